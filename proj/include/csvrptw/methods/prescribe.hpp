#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "csvrptw/core/error.hpp"
#include "csvrptw/core/instance.hpp"
#include "csvrptw/core/penalty.hpp"
#include "csvrptw/core/rng.hpp"
#include "csvrptw/core/route.hpp"
#include "csvrptw/datagen/generative.hpp"
#include "csvrptw/learn/knn.hpp"
#include "csvrptw/learn/mlp.hpp"
#include "csvrptw/learn/ols.hpp"
#include "csvrptw/methods/method.hpp"
#include "csvrptw/penalty_model/predictor.hpp"
#include "csvrptw/penalty_model/training.hpp"
#include "csvrptw/solver/branch_and_price.hpp"
#include "csvrptw/solver/objective.hpp"

namespace csvrptw {

// Everything a method may consume besides the dataset: penalty shape,
// sampling knobs, the solver budget, and, for the two benchmarks only, the
// test scenarios of the observed context.
struct MethodContext {
    PenaltyFn pen = PenaltyFn::quadratic();
    int csaa_count = 50;     // conditional draws per prescription
    int knn_k = 0;           // 0 = ceil(sqrt(n))
    std::uint64_t seed = 0;  // scenario sampling and network init
    MlpHyper mlp;            // learned-penalty network hyperparameters
    const std::vector<Mat>* test_scenarios = nullptr;
    SolveLimits limits;  // route_pool and trace are per-run outputs, left alone
};

struct PnnDiagnostics {
    double final_loss = 0.0;
    Eigen::Index rows = 0;         // training rows after zero-target capping
    std::size_t donor_routes = 0;  // deduplicated donor pool size
    bool zero_fallback = false;    // no positive targets, network frozen at 0
};

struct Prescription {
    Method method = Method::d_avg;
    Eigen::VectorXd x;
    Solution solution;
    SolveReport report;
    double objective = 0.0;   // report.upper under the method's own objective
    std::vector<Route> pool;  // every column the solve generated
    std::optional<PnnDiagnostics> pnn;

    std::string to_json() const {
        const auto num = [](double v) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            return std::string(buf);
        };
        std::string s = "{\"method\":\"";
        s += method_name(method);
        s += "\",\"x\":[";
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            if (k) s += ",";
            s += num(x(k));
        }
        s += "],\"objective\":" + num(objective);
        s += ",\"report\":" + report.to_json();
        if (pnn) {
            s += ",\"pnn\":{\"final_loss\":" + num(pnn->final_loss);
            s += ",\"rows\":" + std::to_string(pnn->rows);
            s += ",\"donor_routes\":" + std::to_string(pnn->donor_routes);
            s += ",\"zero_fallback\":";
            s += pnn->zero_fallback ? "true" : "false";
            s += "}";
        }
        return s + "}";
    }
};

namespace detail {

// Column means of the training travel times as one scenario matrix.
inline Mat mean_training_scenario(const Dataset& data, const Instance& inst) {
    return clamped_scenario(inst, data.t.colwise().mean().transpose());
}

inline Mat mean_of_matrices(const std::vector<Mat>& ms, const Instance& inst) {
    if (ms.empty()) throw ValidationError("mean over an empty scenario list");
    const auto n = static_cast<std::size_t>(inst.n_nodes());
    Mat out(n, n, 0.0);
    for (const Mat& m : ms)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out(i, j) += m(i, j);
    const double inv = 1.0 / static_cast<double>(ms.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) *= inv;
    return out;
}

// Exact renormalization so every solver-bound set meets the 1e-12 simplex
// tolerance regardless of how the weights were produced.
inline ScenarioSet renormalized(ScenarioSet s) {
    double sum = 0.0;
    for (double w : s.weights) sum += w;
    if (sum <= 0.0) throw ValidationError("scenario weights sum to zero");
    for (double& w : s.weights) w /= sum;
    return s;
}

inline const std::vector<Mat>& benchmark_context(Method m, const MethodContext& ctx) {
    if (!ctx.test_scenarios || ctx.test_scenarios->empty())
        throw ConfigError(std::string(method_name(m)) +
                          " is a benchmark and needs the test scenarios of the context");
    return *ctx.test_scenarios;
}

inline int knn_neighbour_count(const Dataset& data, const MethodContext& ctx) {
    return ctx.knn_k > 0 ? ctx.knn_k : default_knn_k(data.x.rows());
}

// Solve under a fixed objective and package the result. A limit hit
// without an incumbent has nothing to prescribe and escalates.
inline Prescription run_method(Method m, const Instance& inst, const SolveObjective& obj,
                               const Eigen::VectorXd& x_new, const MethodContext& ctx) {
    Prescription p;
    p.method = m;
    p.x = x_new;
    SolveLimits limits = ctx.limits;
    limits.route_pool = &p.pool;
    p.report = branch_and_price(inst, obj, limits);
    if (p.report.status == SolveStatus::infeasible)
        throw InfeasibleError(std::string(method_name(m)) + ": instance admits no feasible cover");
    if (p.report.incumbent.routes.empty())
        throw LimitError(std::string(method_name(m)) + ": solver limit hit before any incumbent");
    p.solution = p.report.incumbent;
    p.solution.validate(inst);
    p.objective = p.report.upper;
    return p;
}

}  // namespace detail

// The objective each scenario-based method hands to the solver. The
// learned-penalty method is excluded: its objective depends on donor solve
// pools, so it is assembled by pnn_pipeline instead.
inline SolveObjective method_objective(Method m, const Instance& inst, const Dataset& data,
                                       const Eigen::VectorXd& x_new, const MethodContext& ctx) {
    switch (m) {
        case Method::d_avg:
            return SolveObjective::scenario_based(
                ScenarioSet::uniform({detail::mean_training_scenario(data, inst)}), ctx.pen);
        case Method::pto_ols: {
            const OlsModel ols = fit_ols(data.x, data.t);
            return SolveObjective::scenario_based(
                ScenarioSet::uniform({predict_matrix(ols, inst, x_new)}), ctx.pen);
        }
        case Method::pto_knn: {
            const KnnModel knn = fit_knn(data.x, detail::knn_neighbour_count(data, ctx));
            return SolveObjective::scenario_based(
                ScenarioSet::uniform(
                    {detail::clamped_scenario(inst, knn_predict(knn, data.t, x_new))}),
                ctx.pen);
        }
        case Method::saa:
            return SolveObjective::scenario_based(
                ScenarioSet::uniform(detail::period_matrices(data.t, inst)), ctx.pen);
        case Method::saa_knn: {
            const KnnModel knn = fit_knn(data.x, detail::knn_neighbour_count(data, ctx));
            const Eigen::VectorXd w = knn_weights(knn, x_new);
            const std::vector<Mat> all = detail::period_matrices(data.t, inst);
            // zero-weight scenarios cost pricing time and change nothing
            ScenarioSet s;
            for (Eigen::Index k = 0; k < w.size(); ++k) {
                if (w(k) <= 0.0) continue;
                s.scenarios.push_back(all[static_cast<std::size_t>(k)]);
                s.weights.push_back(w(k));
            }
            return SolveObjective::scenario_based(detail::renormalized(std::move(s)), ctx.pen);
        }
        case Method::csaa: {
            const OlsModel ols = fit_ols(data.x, data.t);
            const CovEstimate cov = estimate_cov(data.x, data.t, ols);
            return SolveObjective::scenario_based(
                sample_conditional_scenarios(ols, cov, inst, x_new, ctx.csaa_count,
                                             derive_seed(ctx.seed, "csaa-scenarios")),
                ctx.pen);
        }
        case Method::rsaa: {
            const OlsModel ols = fit_ols(data.x, data.t);
            return SolveObjective::scenario_based(
                residual_scenarios(ols, data.x, data.t, inst, x_new), ctx.pen);
        }
        case Method::pto_f:
            return SolveObjective::scenario_based(
                ScenarioSet::uniform(
                    {detail::mean_of_matrices(detail::benchmark_context(m, ctx), inst)}),
                ctx.pen);
        case Method::full:
            return SolveObjective::scenario_based(
                ScenarioSet::uniform(detail::benchmark_context(m, ctx)), ctx.pen);
        case Method::p_nn:
            throw ConfigError("P-NN has no standalone objective; use prescribe or pnn_pipeline");
    }
    throw ConfigError("unknown method id");
}

// End-to-end learned-penalty prescription: harvest donor route pools, fit
// the early-arrival and penalty models on them, then solve under the
// trained predictor. Training with no positive target rows would drive the
// network to zero anyway, so that case short-circuits to the exact zero
// predictor and is flagged in the diagnostics.
inline Prescription pnn_pipeline(const Dataset& data, const Eigen::VectorXd& x_new,
                                 const Instance& inst, const MethodContext& ctx,
                                 const std::vector<const Prescription*>& donors) {
    std::vector<Route> pool;
    for (const Prescription* d : donors)
        if (d) pool.insert(pool.end(), d->pool.begin(), d->pool.end());
    if (detail::dedupe_pool(pool).empty())
        throw ValidationError("pnn_pipeline: donor runs contributed no routes");

    const OlsModel ols = fit_ols(data.x, data.t);
    const CovEstimate cov = estimate_cov(data.x, data.t, ols);
    const EarlyArrivalModel early =
        fit_early_arrival(build_early_training(pool, data.x, data.t, inst, ols, cov));
    const PenaltyTrainingSet set =
        build_training_set(pool, data.x, data.t, inst, ctx.pen, ols, cov, early,
                           derive_seed(ctx.seed, "pnn-subsample"));

    PnnDiagnostics diag;
    diag.rows = set.Y.rows();
    diag.donor_routes = detail::dedupe_pool(pool).size();

    MlpModel mlp;
    if ((set.pi.array() > 0.0).any()) {
        MlpHyper hyper = ctx.mlp;
        hyper.seed = derive_seed(ctx.seed, "pnn-mlp");
        mlp = fit_mlp(set.Y, set.pi, hyper);
        diag.final_loss = mlp.final_loss;
    } else {
        mlp = zero_mlp(set.Y.cols());
        diag.zero_fallback = true;
    }

    const SolveObjective obj = SolveObjective::predictor_based(
        make_penalty_predictor(inst, x_new, ols, cov, early, mlp, ctx.pen),
        detail::period_matrices(data.t, inst));
    Prescription p = detail::run_method(Method::p_nn, inst, obj, x_new, ctx);
    p.pnn = diag;
    return p;
}

// One method, one context, one prescription. The learned-penalty method
// recursively runs its two donors on the same data: the point-based solve
// contributes the cheapest pool and the scenario-based solve the richest.
inline Prescription prescribe(Method m, const Dataset& data, const Eigen::VectorXd& x_new,
                              const Instance& inst, const MethodContext& ctx) {
    if (m == Method::p_nn) {
        const Prescription d_avg = prescribe(Method::d_avg, data, x_new, inst, ctx);
        const Prescription saa = prescribe(Method::saa, data, x_new, inst, ctx);
        return pnn_pipeline(data, x_new, inst, ctx, {&d_avg, &saa});
    }
    return detail::run_method(m, inst, method_objective(m, inst, data, x_new, ctx), x_new, ctx);
}

}  // namespace csvrptw
