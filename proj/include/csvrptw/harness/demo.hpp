#pragma once

#include <array>
#include <string>
#include <vector>

#include "csvrptw/harness/evaluate.hpp"
#include "csvrptw/harness/toy.hpp"
#include "csvrptw/methods/prescribe.hpp"

namespace csvrptw {

struct DemoOptions {
    int n = 10;          // training periods
    int csaa_count = 50;
    int n_t = 50;        // test draws per context
    double time_limit = 0.0;
};

struct DemoMethodRun {
    std::string fingerprint;  // canonical route structure, e.g. "1-3|2-5-4"
    double objective = 0.0;   // solver value under the method's objective
    double test_cost = 0.0;   // realized average over the context's draws
    Solution solution;
};

// Two observed contexts on a tiny sigmoidal network: the feature-blind
// scenario method cannot tell them apart, the conditional one can, and on
// a good seed the conditional prescriptions coincide with the
// full-information ones.
struct DemoReport {
    std::uint64_t seed = 0;
    std::array<double, 2> xs{0.28, 0.83};
    // indexed [method][context], methods in listing order
    static constexpr std::array<Method, 4> kMethods{Method::d_avg, Method::saa, Method::csaa,
                                                    Method::full};
    std::array<std::array<DemoMethodRun, 2>, 4> runs;
    bool saa_identical = false;
    bool csaa_differs = false;
    bool csaa_matches_full = false;

    std::string to_json() const {
        std::string s = "{\"seed\":" + std::to_string(seed) + ",\"xs\":[" +
                        detail::num17(xs[0]) + "," + detail::num17(xs[1]) + "],\"methods\":[";
        for (std::size_t m = 0; m < kMethods.size(); ++m) {
            if (m) s += ",";
            s += "{\"method\":\"" + std::string(method_name(kMethods[m])) + "\",\"contexts\":[";
            for (std::size_t c = 0; c < 2; ++c) {
                if (c) s += ",";
                s += "{\"fingerprint\":\"" + runs[m][c].fingerprint + "\"";
                s += ",\"objective\":" + detail::num17(runs[m][c].objective);
                s += ",\"test_cost\":" + detail::num17(runs[m][c].test_cost) + "}";
            }
            s += "]}";
        }
        s += "],\"saa_identical\":";
        s += saa_identical ? "true" : "false";
        s += ",\"csaa_differs\":";
        s += csaa_differs ? "true" : "false";
        s += ",\"csaa_matches_full\":";
        s += csaa_matches_full ? "true" : "false";
        return s + "}";
    }
};

inline std::string route_fingerprint(const Solution& sol) {
    const Solution c = sol.canonical();
    std::string s;
    for (std::size_t r = 0; r < c.routes.size(); ++r) {
        if (r) s += "|";
        for (std::size_t k = 0; k < c.routes[r].seq.size(); ++k) {
            if (k) s += "-";
            s += std::to_string(c.routes[r].seq[k]);
        }
    }
    return s;
}

inline DemoReport run_illustrative_example(std::uint64_t seed, const DemoOptions& opt = {}) {
    ToyOptions toy;
    toy.n_customers = 5;
    const Instance inst = random_toy_instance(derive_seed(seed, "demo-instance"), toy);

    GenOptions gen;
    gen.zero_intercept_coef = true;  // each arc switches state at feature value 1/2
    const GenerativeModel gm = make_generative_model(inst, ModelKind::sigmoidal, 2,
                                                     derive_seed(seed, "demo-model"), gen);
    const Dataset data = make_dataset(gm, inst, opt.n, 2, derive_seed(seed, "demo-data"));

    DemoReport rep;
    rep.seed = seed;

    // the two observed contexts and their test draws
    std::array<Eigen::VectorXd, 2> ctx_x;
    std::array<std::vector<Mat>, 2> draws;
    for (std::size_t c = 0; c < 2; ++c) {
        ctx_x[c] = Eigen::Vector2d(1.0, rep.xs[c]);
        std::mt19937_64 rng = make_rng(derive_seed(seed, "demo-test-" + std::to_string(c)));
        for (int w = 0; w < opt.n_t; ++w)
            draws[c].push_back(sample_travel_times(gm, inst, ctx_x[c], rng));
    }

    for (std::size_t m = 0; m < DemoReport::kMethods.size(); ++m) {
        for (std::size_t c = 0; c < 2; ++c) {
            MethodContext ctx;
            ctx.csaa_count = opt.csaa_count;
            ctx.seed = derive_seed(seed, "demo-x" + std::to_string(c));
            ctx.limits.time_limit = opt.time_limit;
            ctx.test_scenarios = &draws[c];
            const Prescription p =
                prescribe(DemoReport::kMethods[m], data, ctx_x[c], inst, ctx);

            DemoMethodRun& run = rep.runs[m][c];
            run.solution = p.solution;
            run.fingerprint = route_fingerprint(p.solution);
            run.objective = p.objective;
            double cost = 0.0;
            for (const Mat& t : draws[c]) cost += solution_value_single(inst, p.solution, t, ctx.pen);
            run.test_cost = cost / static_cast<double>(draws[c].size());
        }
    }

    const auto& saa = rep.runs[1];
    const auto& csaa = rep.runs[2];
    const auto& full = rep.runs[3];
    rep.saa_identical = saa[0].solution.same_structure(saa[1].solution);
    rep.csaa_differs = !csaa[0].solution.same_structure(csaa[1].solution);
    rep.csaa_matches_full = csaa[0].solution.same_structure(full[0].solution) &&
                            csaa[1].solution.same_structure(full[1].solution);
    return rep;
}

}  // namespace csvrptw
