#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "csvrptw/core/error.hpp"
#include "csvrptw/core/route.hpp"
#include "csvrptw/datagen/generative.hpp"
#include "csvrptw/methods/prescribe.hpp"

namespace csvrptw {

struct TestCostBreakdown {
    double r_hat = 0.0;  // average realized cost over contexts and draws
    double c_hat = 0.0;  // transportation share
    double q_hat = 0.0;  // penalty share
};

// Out-of-sample cost of one prescription per context: the double average
// over observed contexts and their test draws, split into the
// draw-independent route cost and the averaged penalties.
inline TestCostBreakdown evaluate_test_cost(const Instance& inst,
                                            const std::vector<Prescription>& per_context,
                                            const TestSet& test, const PenaltyFn& pen) {
    if (test.features.empty()) throw ValidationError("evaluate_test_cost: empty test set");
    if (per_context.size() != test.features.size())
        throw ValidationError("evaluate_test_cost: need exactly one prescription per context");
    TestCostBreakdown out;
    for (std::size_t ix = 0; ix < per_context.size(); ++ix) {
        const Solution& sol = per_context[ix].solution;
        sol.validate(inst);
        const std::vector<Mat>& draws = test.times[ix];
        if (draws.empty()) throw ValidationError("evaluate_test_cost: context has no draws");
        double c = 0.0;
        for (const Route& r : sol.routes) c += route_cost(inst, r);
        double q = 0.0;
        for (const Mat& t : draws)
            for (const Route& r : sol.routes) q += route_penalty(inst, r, t, pen);
        q /= static_cast<double>(draws.size());
        out.c_hat += c;
        out.q_hat += q;
    }
    const double inv = 1.0 / static_cast<double>(per_context.size());
    out.c_hat *= inv;
    out.q_hat *= inv;
    out.r_hat = out.c_hat + out.q_hat;
    return out;
}

// Percentage excess over the full-information cost on the same test set.
inline double full_info_gap_percent(double r_hat, double r_hat_full) {
    if (r_hat_full <= 0.0)
        throw ValidationError("full-information cost must be positive to take a gap");
    return (r_hat - r_hat_full) / r_hat_full * 100.0;
}

namespace detail {

inline std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

}  // namespace detail

// One line of an experiment: a method evaluated on one (instance, seed)
// cell. The CSV omits the wall time so reruns are byte-identical; the JSON
// sidecar keeps it. rho and the solve gaps travel together so gap-based
// filtering can be recomputed from the rows alone.
struct ResultRow {
    std::string instance;
    std::string model;
    std::uint64_t seed = 0;
    std::string method;
    double r_hat = 0.0;
    double c_hat = 0.0;
    double q_hat = 0.0;
    double rho = std::numeric_limits<double>::quiet_NaN();  // percent vs Full
    double solve_gap = 0.0;       // worst branch-and-price gap over the contexts
    double full_solve_gap = 0.0;  // same, for the Full run it is gapped against
    double wall_seconds = 0.0;    // sidecar only

    static std::string csv_header() {
        return "instance,model,seed,method,r_hat,c_hat,q_hat,rho,solve_gap,full_solve_gap";
    }

    std::string csv() const {
        std::string s = instance + "," + model + "," + std::to_string(seed) + "," + method;
        for (double v : {r_hat, c_hat, q_hat, rho, solve_gap, full_solve_gap})
            s += "," + detail::num17(v);
        return s;
    }

    std::string to_json() const {
        std::string s = "{\"instance\":\"" + instance + "\",\"model\":\"" + model + "\"";
        s += ",\"seed\":" + std::to_string(seed);
        s += ",\"method\":\"" + method + "\"";
        s += ",\"r_hat\":" + detail::num17(r_hat);
        s += ",\"c_hat\":" + detail::num17(c_hat);
        s += ",\"q_hat\":" + detail::num17(q_hat);
        s += ",\"rho\":" + (std::isfinite(rho) ? detail::num17(rho) : std::string("null"));
        s += ",\"solve_gap\":" + detail::num17(solve_gap);
        s += ",\"full_solve_gap\":" + detail::num17(full_solve_gap);
        s += ",\"wall_seconds\":" + detail::num17(wall_seconds);
        return s + "}";
    }
};

inline ResultRow parse_result_row(const std::string& line) {
    std::vector<std::string> f;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, ',')) f.push_back(cur);
    if (f.size() != 10) throw ParseError("result row needs 10 fields: " + line);
    ResultRow r;
    r.instance = f[0];
    r.model = f[1];
    try {
        r.seed = std::stoull(f[2]);
        r.method = f[3];
        r.r_hat = std::stod(f[4]);
        r.c_hat = std::stod(f[5]);
        r.q_hat = std::stod(f[6]);
        r.rho = std::stod(f[7]);
        r.solve_gap = std::stod(f[8]);
        r.full_solve_gap = std::stod(f[9]);
    } catch (const std::exception&) {
        throw ParseError("malformed result row: " + line);
    }
    return r;
}

inline std::string render_rows_csv(const std::vector<ResultRow>& rows) {
    std::string out = ResultRow::csv_header() + "\n";
    for (const ResultRow& r : rows) out += r.csv() + "\n";
    return out;
}

inline std::vector<ResultRow> parse_rows_csv(std::istream& in) {
    std::vector<ResultRow> rows;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("result CSV is empty");
    if (line != ResultRow::csv_header())
        throw ParseError("unexpected result CSV header: " + line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(parse_result_row(line));
    }
    return rows;
}

}  // namespace csvrptw
