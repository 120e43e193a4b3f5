#pragma once

#include <chrono>
#include <optional>
#include <vector>

#include "csvrptw/solver/rmp.hpp"

namespace csvrptw {

struct CgOutcome {
    double value = 0.0;       // node LP optimum; a lower bound iff bound_valid
    bool bound_valid = true;  // pricing converged (no deadline/label-cap abort)
    bool infeasible = false;  // big-M columns stayed active after convergence
    LpSolution lp;            // final restricted master solution
    RmpLayout layout;         // column mapping matching `lp`
    Duals duals;              // duals of the final master
    PricingStats pricing;     // accumulated over all pricing rounds
    std::size_t added = 0;    // columns the node contributed to the pool
    int iterations = 0;
};

// Solve master -> price -> add columns until no route prices below
// -accept_tol. The pool grows monotonically; `rules` decides which pool
// columns participate. At the root a label-cap abort raises LimitError and
// an active big-M column raises InfeasibleError; elsewhere both degrade
// into flags the tree search can act on (finer-grid retry happens here).
inline CgOutcome column_generation(const Instance& inst, const SolveObjective& obj,
                                   ColumnPool& pool, const ArcRules& rules, bool at_root,
                                   PricingOptions popt,
                                   const std::chrono::steady_clock::time_point* deadline = nullptr) {
    if (popt.max_routes == 0) popt.max_routes = 400;

    CgOutcome out;
    std::vector<std::size_t> active;
    std::size_t filtered_up_to = 0;
    const auto refresh_active = [&]() {
        for (; filtered_up_to < pool.size(); ++filtered_up_to)
            if (route_respects(pool.at(filtered_up_to).route, rules))
                active.push_back(filtered_up_to);
    };

    LpBasis warm;
    int warm_n_struct = 0;
    bool retried_finer_grid = false;

    while (true) {
        refresh_active();
        out.layout = build_rmp(inst, pool, active);
        const LpBasis shifted =
            shift_basis(warm, warm_n_struct, out.layout.lp.n_cols() - warm_n_struct);
        out.lp = solve_lp(out.layout.lp, shifted.basic.empty() ? nullptr : &shifted);
        ++out.iterations;
        if (out.lp.status != LpStatus::optimal) {
            // big-M columns make the master feasible and bounded by design
            throw NumericError("restricted master came back " +
                               std::string(out.lp.status == LpStatus::infeasible ? "infeasible"
                                                                                 : "unbounded"));
        }
        warm = out.lp.basis;
        warm_n_struct = out.layout.lp.n_cols();
        out.duals = duals_from_lp(inst, out.lp);

        const PricingResult priced = obj.price(inst, out.duals, rules, popt);
        out.pricing.created += priced.stats.created;
        out.pricing.pruned_rcsp += priced.stats.pruned_rcsp;
        out.pricing.pruned_knapsack += priced.stats.pruned_knapsack;
        out.pricing.rejected_capacity += priced.stats.rejected_capacity;
        out.pricing.emitted += priced.stats.emitted;
        out.pricing.exhausted = out.pricing.exhausted || priced.stats.exhausted;

        if (priced.stats.exhausted) {
            if (at_root) throw LimitError("pricing exhausted the label cap at the root node");
            if (!retried_finer_grid) {
                retried_finer_grid = true;
                const double dt = popt.rcsp.dt > 0.0 ? popt.rcsp.dt : default_grid_dt(inst);
                popt.rcsp.dt = dt / 2.0;
                continue;  // same master, finer completion grid
            }
            out.bound_valid = false;
            break;
        }
        if (priced.routes.empty()) break;  // no column below -accept_tol: converged

        std::size_t added_now = 0;
        for (const PricedRoute& pr : priced.routes)
            if (pool.add(inst, obj, pr.route)) ++added_now;
        if (added_now == 0) {
            // Every priced column already sits in the master. With explicit
            // z <= 1 bounds that is optimal as long as each one is at its
            // upper bound (negative reduced cost is allowed there), but a
            // truncated batch might still hide an unseen column behind the
            // known ones.
            for (const PricedRoute& pr : priced.routes) {
                const auto pidx = pool.find(pr.route);
                const auto pos = static_cast<std::size_t>(
                    std::lower_bound(active.begin(), active.end(), *pidx) - active.begin());
                if (pos >= active.size() || active[pos] != *pidx)
                    throw NumericError("priced column missing from the active master");
                const double z =
                    out.lp.z[static_cast<std::size_t>(out.layout.n_bigm) + pos];
                if (z < 1.0 - 1e-6)
                    throw NumericError("column " + pr.route.str() +
                                       " prices negative while off its bound");
            }
            if (priced.routes.size() < popt.max_routes) break;  // the full list is known
            popt.max_routes *= 4;
            continue;
        }
        out.added += added_now;

        if (deadline != nullptr && std::chrono::steady_clock::now() > *deadline) {
            out.bound_valid = false;
            break;
        }
    }

    out.value = out.lp.objective;
    double bigm_level = 0.0;
    for (int i = 0; i < out.layout.n_bigm; ++i)
        bigm_level = std::max(bigm_level, out.lp.z[static_cast<std::size_t>(i)]);
    if (out.bound_valid && bigm_level > 1e-7) {
        if (at_root)
            throw InfeasibleError("no cover within the fleet size: big-M level " +
                                  std::to_string(bigm_level));
        out.infeasible = true;
    }
    return out;
}

}  // namespace csvrptw
