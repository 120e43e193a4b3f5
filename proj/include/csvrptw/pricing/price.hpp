#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "csvrptw/core/instance.hpp"
#include "csvrptw/core/penalty.hpp"
#include "csvrptw/core/route.hpp"
#include "csvrptw/penalty_model/predictor.hpp"
#include "csvrptw/pricing/duals.hpp"
#include "csvrptw/pricing/knapsack_bound.hpp"
#include "csvrptw/pricing/label.hpp"
#include "csvrptw/pricing/rcsp.hpp"

namespace csvrptw {

struct PricingOptions {
    double accept_tol = 1e-6;            // emit only routes with cbar < -accept_tol
    std::size_t max_labels = 2'000'000;  // live-label cap; hitting it aborts the search
    std::size_t max_routes = 0;          // 0 keeps every negative column found
    RcspConfig rcsp;
};

struct PricingStats {
    std::size_t created = 0;
    std::size_t pruned_rcsp = 0;
    std::size_t pruned_knapsack = 0;
    std::size_t rejected_capacity = 0;
    std::size_t emitted = 0;
    bool exhausted = false;
};

struct PricedRoute {
    Route route;
    double reduced_cost = 0.0;
};

// routes come back sorted by reduced cost, ties by customer sequence, so
// the output set is reproducible across runs. An empty list with
// exhausted == false certifies that no negative column exists.
struct PricingResult {
    std::vector<PricedRoute> routes;
    PricingStats stats;
};

// Scenario-average objective: label arithmetic delegates to the free
// extension functions, the knapsack floor is the penalty at the earliest
// conceivable arrival.
class ScenarioObjective {
  public:
    struct State {};

    ScenarioObjective(const Instance& inst, const ScenarioSet& scen, const Duals& duals,
                      const PenaltyFn& pen, const Mat& min_t)
        : inst_(&inst), scen_(&scen), duals_(&duals), pen_(&pen), min_t_(&min_t) {}

    std::optional<std::pair<Label, State>> seed(int j) const {
        return std::pair<Label, State>{seed_label(j, *scen_, *duals_, *pen_, *inst_), State{}};
    }

    std::optional<std::pair<Label, State>> extend(const Label& lab, const State&, int j) const {
        std::optional<Label> next = extend_label(lab, j, *scen_, *duals_, *pen_, *inst_);
        if (!next) return std::nullopt;
        return std::pair<Label, State>{std::move(*next), State{}};
    }

    double recompute(const Route& r) const {
        return scenario_reduced_cost(r, *scen_, *duals_, *pen_, *inst_);
    }

    double knapsack(const Label& lab) const {
        return knapsack_bound(lab, *duals_, *min_t_, *pen_, *inst_);
    }

  private:
    const Instance* inst_;
    const ScenarioSet* scen_;
    const Duals* duals_;
    const PenaltyFn* pen_;
    const Mat* min_t_;
};

// Predicted-penalty objective: the per-customer penalty is the network
// evaluated on incrementally maintained projection state, and the tracked
// start vectors run over the training periods purely to keep tau a valid
// earliest service start. Completion bounds drop the penalty terms, which
// stays sound because predictions are clamped at zero.
class PenaltyObjective {
  public:
    struct State {
        int prev = 0;            // predecessor of the label's last customer
        int position = 0;        // 1-based position of the last customer
        double a_free = 0.0;     // arrival under nominal times
        double a_hat = 0.0;      // arrival under predicted times
        double xi = 0.0;         // service start risk at the last customer
        double max_ready = 0.0;  // latest window opening through the path
        double prefix = 0.0;     // arc-cost sum through the arc into last
    };

    PenaltyObjective(const Instance& inst, const PenaltyPredictor& model,
                     const std::vector<Mat>& periods, const Duals& duals)
        : inst_(&inst), model_(&model), periods_(&periods), duals_(&duals),
          ix_(inst.arc_index()) {}

    std::optional<std::pair<Label, State>> seed(int j) const {
        const auto ju = static_cast<std::size_t>(j);
        Label lab;
        lab.last = j;
        lab.load = inst_->demand[ju];
        lab.visited = std::uint64_t{1} << ju;
        lab.starts.resize(periods_->size());
        lab.tau = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < periods_->size(); ++k) {
            lab.starts[k] = std::max(inst_->ready[ju], (*periods_)[k](0, ju));
            lab.tau = std::min(lab.tau, lab.starts[k]);
        }

        State st;
        st.prev = 0;
        st.position = 1;
        st.a_free = inst_->nominal(0, ju);
        st.a_hat = model_->t_hat(0, ju);
        st.prefix = inst_->cost(0, ju);
        const double h = predicted_penalty(j, inst_->ready[0], 0, st);
        st.max_ready = std::max(inst_->ready[0], inst_->ready[ju]);

        lab.cbar =
            -duals_->mu + inst_->cost(0, ju) + inst_->cost(ju, 0) + h - duals_->gamma[ju];
        return std::pair<Label, State>{std::move(lab), st};
    }

    std::optional<std::pair<Label, State>> extend(const Label& lab, const State& cur,
                                                  int j) const {
        const auto iu = static_cast<std::size_t>(lab.last);
        const auto ju = static_cast<std::size_t>(j);
        const int load = lab.load + inst_->demand[ju];
        if (load > inst_->capacity) return std::nullopt;

        Label next;
        next.last = j;
        next.load = load;
        next.visited = lab.visited | (std::uint64_t{1} << ju);
        next.starts.resize(periods_->size());
        next.tau = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < periods_->size(); ++k) {
            next.starts[k] = std::max(inst_->ready[ju], lab.starts[k] + (*periods_)[k](iu, ju));
            next.tau = std::min(next.tau, next.starts[k]);
        }

        State st;
        st.prev = lab.last;
        st.position = cur.position + 1;
        st.a_free = std::max(inst_->ready[iu], cur.a_free) + inst_->nominal(iu, ju);
        st.a_hat = std::max(inst_->ready[iu], cur.a_hat) + model_->t_hat(iu, ju);
        st.prefix = cur.prefix + inst_->cost(iu, ju);
        st.xi = cur.xi;
        const double h = predicted_penalty(j, cur.max_ready, cur.prev, st);
        st.max_ready = std::max(cur.max_ready, inst_->ready[ju]);

        next.cbar = lab.cbar - inst_->cost(iu, 0) + inst_->cost(iu, ju) + inst_->cost(ju, 0) +
                    h - duals_->gamma[ju];
        return std::pair<Label, State>{std::move(next), st};
    }

    double recompute(const Route& r) const {
        double c = route_cost(*inst_, r) + model_->route_sum(*inst_, r) - duals_->mu;
        for (int v : r.seq) c -= duals_->gamma[static_cast<std::size_t>(v)];
        return c;
    }

    double knapsack(const Label& lab) const {
        return knapsack_completion_bound(*inst_, *duals_, lab.last, lab.load, lab.tau,
                                         lab.visited, [](int, int, double) { return 0.0; });
    }

  private:
    // Finishes st for the step into j (early probability, risk, prediction)
    // given the predecessor fields already written. max_prev_e is the latest
    // window opening among strict predecessors; prev2 precedes st.prev on
    // the path and feeds the adjacent-arc covariance term.
    double predicted_penalty(int j, double max_prev_e, int prev2, State& st) const {
        const auto ju = static_cast<std::size_t>(j);
        const auto pu = static_cast<std::size_t>(st.prev);
        const auto arc_in = static_cast<Eigen::Index>(ix_.index(pu, ju));
        const double var = model_->cov.sigma(arc_in, arc_in);
        const Eigen::VectorXd w = early_covariates_from(model_->x, inst_->ready[ju], st.a_hat,
                                                        var, max_prev_e, st.prefix);
        const double p =
            estimate_early_arrival_from(*inst_, j, st.prefix, max_prev_e, model_->early, w);
        if (st.position == 1) {
            st.xi = (1.0 - p) * var;
        } else {
            const auto arc_prev =
                static_cast<Eigen::Index>(ix_.index(static_cast<std::size_t>(prev2), pu));
            st.xi = (1.0 - p) *
                    (st.xi + var + 2.0 * model_->cov.sigma(arc_prev, arc_in));
        }
        st.xi = std::max(0.0, st.xi);

        FpfPoint pt;
        pt.node = j;
        pt.prev = st.prev;
        pt.position = st.position;
        pt.a_free = st.a_free;
        pt.a_hat = st.a_hat;
        pt.xi = st.xi;
        return model_->mlp.predict(
            fpf_features(model_->x, *inst_, model_->pen, model_->t_hat, model_->cov, pt));
    }

    const Instance* inst_;
    const PenaltyPredictor* model_;
    const std::vector<Mat>* periods_;
    const Duals* duals_;
    ArcIndex ix_;
};

// Best-first extend-and-bound search shared by both pricing problems. A
// new label is emitted as a column the moment its reduced cost clears the
// acceptance threshold, then kept for extension only if neither completion
// bound proves it hopeless. The queue orders by cbar plus the table bound.
template <class Obj>
PricingResult run_labeling(const Obj& obj, const Instance& inst, const CompletionBounds& bounds,
                           const ArcRules& rules, const PricingOptions& opt) {
    if (inst.n_customers > 63)
        throw ValidationError("labeling bitset supports at most 63 customers");

    PricingResult out;
    PricingStats& st = out.stats;
    std::vector<Label> arena;
    std::vector<typename Obj::State> states;
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;

    const auto recover = [&](const Label& leaf) {
        Route r;
        r.seq.push_back(leaf.last);
        for (std::int32_t p = leaf.parent; p >= 0;
             p = arena[static_cast<std::size_t>(p)].parent)
            r.seq.push_back(arena[static_cast<std::size_t>(p)].last);
        std::reverse(r.seq.begin(), r.seq.end());
        return r;
    };

    const auto consider = [&](std::optional<std::pair<Label, typename Obj::State>> cand) {
        if (!cand) {
            ++st.rejected_capacity;
            return;
        }
        Label& lab = cand->first;
        if (lab.cbar < -opt.accept_tol && rules.allowed(static_cast<std::size_t>(lab.last), 0)) {
            Route r = recover(lab);
            const double check = obj.recompute(r);
            if (std::abs(check - lab.cbar) > 1e-8)
                throw NumericError("pricing: route " + r.str() + " recomputes to " +
                                   std::to_string(check) + " against label " +
                                   std::to_string(lab.cbar));
            out.routes.push_back({std::move(r), lab.cbar});
            ++st.emitted;
        }
        const double t_rcsp = bounds.bound(lab.last, inst.capacity - lab.load, lab.tau);
        if (lab.cbar + t_rcsp >= -opt.accept_tol) {
            ++st.pruned_rcsp;
            return;
        }
        if (lab.cbar + obj.knapsack(lab) >= -opt.accept_tol) {
            ++st.pruned_knapsack;
            return;
        }
        if (arena.size() >= opt.max_labels) {
            st.exhausted = true;
            return;
        }
        queue.emplace(lab.cbar + t_rcsp, arena.size());
        arena.push_back(std::move(lab));
        states.push_back(std::move(cand->second));
        ++st.created;
    };

    for (int j = 1; j <= inst.n_customers && !st.exhausted; ++j)
        if (rules.allowed(0, static_cast<std::size_t>(j))) consider(obj.seed(j));

    while (!queue.empty() && !st.exhausted) {
        const std::size_t idx = queue.top().second;
        queue.pop();
        // copies survive arena reallocation during extension
        const Label cur = arena[idx];
        const typename Obj::State cur_state = states[idx];
        for (int j = 1; j <= inst.n_customers && !st.exhausted; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            if ((cur.visited >> ju) & 1u) continue;
            if (!rules.allowed(static_cast<std::size_t>(cur.last), ju)) continue;
            auto cand = obj.extend(cur, cur_state, j);
            if (cand) cand->first.parent = static_cast<std::int32_t>(idx);
            consider(std::move(cand));
        }
    }

    std::sort(out.routes.begin(), out.routes.end(),
              [](const PricedRoute& a, const PricedRoute& b) {
                  if (a.reduced_cost != b.reduced_cost) return a.reduced_cost < b.reduced_cost;
                  return a.route.seq < b.route.seq;
              });
    if (opt.max_routes > 0 && out.routes.size() > opt.max_routes)
        out.routes.resize(opt.max_routes);
    return out;
}

inline PricingResult price(const Instance& inst, const Duals& duals, const ScenarioSet& scen,
                           const PenaltyFn& pen, const ArcRules& rules = {},
                           const PricingOptions& opt = {}) {
    duals.validate(inst);
    scen.validate(inst);
    const Mat min_t = scenario_min(scen.scenarios);
    const CompletionBounds bounds = build_rcsp_bound(inst, duals, pen, min_t, rules, opt.rcsp);
    const ScenarioObjective obj(inst, scen, duals, pen, min_t);
    return run_labeling(obj, inst, bounds, rules, opt);
}

// Pricing under the penalty predictor. The periods are the training
// travel-time matrices; their entrywise minimum is the travel lower bound.
inline PricingResult price_penalty_model(const Instance& inst, const Duals& duals,
                                         const PenaltyPredictor& model,
                                         const std::vector<Mat>& periods,
                                         const ArcRules& rules = {}, PricingOptions opt = {}) {
    duals.validate(inst);
    if (periods.empty())
        throw ValidationError("penalty pricing needs at least one training period");
    const auto n = static_cast<std::size_t>(inst.n_nodes());
    for (const Mat& t : periods)
        if (t.rows() != n || t.cols() != n)
            throw ValidationError("penalty pricing: period matrix shape mismatch");
    const Mat min_t = scenario_min(periods);
    opt.rcsp.with_penalty = false;
    const CompletionBounds bounds =
        build_rcsp_bound(inst, duals, model.pen, min_t, rules, opt.rcsp);
    const PenaltyObjective obj(inst, model, periods, duals);
    return run_labeling(obj, inst, bounds, rules, opt);
}

}  // namespace csvrptw
