#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "csvrptw/core/instance.hpp"
#include "csvrptw/core/penalty.hpp"
#include "csvrptw/core/route.hpp"
#include "csvrptw/pricing/duals.hpp"

namespace csvrptw {

struct RcspConfig {
    double dt = 0.0;              // grid step, 0 selects l_max / 40
    bool verbatim_delta = false;  // keep successor lookups at the same grid point
    bool with_penalty = true;     // false builds the prediction-free relaxation
};

// Completion bound table over (departure grid point, node, residual load).
// table(g,i,q) lower-bounds the cost of any 2-cycle-free walk from i back
// to the depot that collects at most q more demand and departs i no earlier
// than g*dt, counting arc costs, window penalties, and -gamma credits.
//
// Invariants: table(g,i,q) <= table(g,i,q-1); table(g,0,q) == 0; the
// exposed bound(i,q,tau) = table(gridfloor(tau),i,q) - c_{i0} is <= 0.
class CompletionBounds {
  public:
    CompletionBounds(int grid_last, double dt, std::size_t n_nodes, int capacity,
                     std::vector<double> return_cost)
        : grid_last_(grid_last), dt_(dt), n_(n_nodes), cap_(capacity),
          return_cost_(std::move(return_cost)),
          t1_(static_cast<std::size_t>(grid_last + 1) * n_nodes *
              static_cast<std::size_t>(capacity + 1)) {}

    double dt() const { return dt_; }
    int grid_last() const { return grid_last_; }

    int grid_index(double tau) const {
        if (tau <= 0.0) return 0;
        const int g = static_cast<int>(std::floor(tau / dt_));
        return std::min(g, grid_last_);
    }

    double& t1(int g, std::size_t i, int q) {
        return t1_[(static_cast<std::size_t>(g) * n_ + i) * static_cast<std::size_t>(cap_ + 1) +
                   static_cast<std::size_t>(q)];
    }
    double t1(int g, std::size_t i, int q) const {
        return t1_[(static_cast<std::size_t>(g) * n_ + i) * static_cast<std::size_t>(cap_ + 1) +
                   static_cast<std::size_t>(q)];
    }

    // T_hat(i, residual, tau): best possible reduced-cost decrease from i,
    // net of the return leg the label already carries.
    double bound(int i, int residual, double tau) const {
        if (i < 1 || static_cast<std::size_t>(i) >= n_)
            throw ValidationError("completion bound: node out of range");
        if (residual < 0) throw ValidationError("completion bound: negative residual load");
        const int q = std::min(residual, cap_);
        return t1(grid_index(tau), static_cast<std::size_t>(i), q) -
               return_cost_[static_cast<std::size_t>(i)];
    }

  private:
    int grid_last_ = 0;
    double dt_ = 0.0;
    std::size_t n_ = 0;
    int cap_ = 0;
    std::vector<double> return_cost_;
    std::vector<double> t1_;
};

// Dynamic program over descending departure grid points and ascending
// residual load. Base cases: depot row 0, zero load c_{i0}. Each cell
// inherits the previous load's value and improves over single-arc
// extensions; best and second-best values with the successor matrix
// implement 2-cycle elimination. min_t must lower-bound every tracked
// travel-time matrix entrywise.
//
// Successor lookups move to the grid floor of delta + min_t(i,j) so later
// departures meet later tables; verbatim_delta pins them to the current
// grid point instead. The window penalty argument is the looked-up grid
// value, which never exceeds the true service start.
// The grid step used when RcspConfig::dt is unset: 1/40 of the latest
// customer due time. The solver halves it when re-processing a node whose
// pricing ran out of labels.
inline double default_grid_dt(const Instance& inst) {
    double l_max = 0.0;
    for (int j = 1; j <= inst.n_customers; ++j)
        l_max = std::max(l_max, inst.due[static_cast<std::size_t>(j)]);
    const double dt = l_max / 40.0;
    return dt > 0.0 ? dt : 1.0;
}

inline CompletionBounds build_rcsp_bound(const Instance& inst, const Duals& duals,
                                         const PenaltyFn& pen, const Mat& min_t,
                                         const ArcRules& rules = {}, RcspConfig cfg = {}) {
    duals.validate(inst);
    const auto n = static_cast<std::size_t>(inst.n_nodes());
    if (min_t.rows() != n || min_t.cols() != n)
        throw ValidationError("rcsp bound: travel lower bound shape mismatch");

    double l_max = 0.0;
    for (std::size_t i = 1; i < n; ++i) l_max = std::max(l_max, inst.due[i]);
    double dt = cfg.dt > 0.0 ? cfg.dt : default_grid_dt(inst);
    if (dt <= 0.0) dt = 1.0;
    const int G = std::max(0, static_cast<int>(std::ceil(l_max / dt - 1e-9)));

    std::vector<double> ret(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) ret[i] = inst.cost(i, 0);
    CompletionBounds b(G, dt, n, inst.capacity, ret);

    const double inf = std::numeric_limits<double>::infinity();
    const int Q = inst.capacity;
    const auto cell = [&](std::size_t i, int q) {
        return i * static_cast<std::size_t>(Q + 1) + static_cast<std::size_t>(q);
    };
    // second-best values and best-successor ids, per grid slice
    std::vector<std::vector<double>> t2(static_cast<std::size_t>(G + 1),
                                        std::vector<double>(n * static_cast<std::size_t>(Q + 1), inf));
    std::vector<std::vector<int>> nx(static_cast<std::size_t>(G + 1),
                                     std::vector<int>(n * static_cast<std::size_t>(Q + 1), 0));

    // grid hops per arc: floor(min_t / dt) keeps the mapped departure a
    // lower bound on the true one
    std::vector<int> hop(n * n, 0);
    if (!cfg.verbatim_delta)
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 1; j < n; ++j)
                if (i != j) hop[i * n + j] = static_cast<int>(std::floor(min_t(i, j) / dt));

    for (int g = G; g >= 0; --g) {
        auto& t2g = t2[static_cast<std::size_t>(g)];
        auto& nxg = nx[static_cast<std::size_t>(g)];
        for (int q = 0; q <= Q; ++q) b.t1(g, 0, q) = 0.0;
        for (std::size_t i = 1; i < n; ++i) b.t1(g, i, 0) = inst.cost(i, 0);

        for (int q = 1; q <= Q; ++q) {
            for (std::size_t i = 1; i < n; ++i) {
                double best = b.t1(g, i, q - 1);
                double second = t2g[cell(i, q - 1)];
                int succ = nxg[cell(i, q - 1)];
                for (std::size_t j = 1; j < n; ++j) {
                    if (j == i || inst.demand[j] > q || !rules.allowed(i, j)) continue;
                    const int gp = cfg.verbatim_delta
                                       ? g
                                       : std::min(G, g + hop[i * n + j]);
                    const int qj = q - inst.demand[j];
                    const double look = nx[static_cast<std::size_t>(gp)][cell(j, qj)] ==
                                                static_cast<int>(i)
                                            ? t2[static_cast<std::size_t>(gp)][cell(j, qj)]
                                            : b.t1(gp, j, qj);
                    double v = inst.cost(i, j) - duals.gamma[j] + look;
                    if (cfg.with_penalty) v += pen(static_cast<double>(gp) * dt - inst.due[j]);
                    if (v < best) {
                        second = best;
                        best = v;
                        succ = static_cast<int>(j);
                    } else if (v < second) {
                        second = v;
                    }
                }
                b.t1(g, i, q) = best;
                t2g[cell(i, q)] = second;
                nxg[cell(i, q)] = succ;
            }
        }
    }
    return b;
}

inline CompletionBounds build_rcsp_bound(const Instance& inst, const Duals& duals,
                                         const PenaltyFn& pen, const ScenarioSet& scen,
                                         const ArcRules& rules = {}, RcspConfig cfg = {}) {
    return build_rcsp_bound(inst, duals, pen, scenario_min(scen.scenarios), rules, cfg);
}

}  // namespace csvrptw
