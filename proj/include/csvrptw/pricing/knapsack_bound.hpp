#pragma once

#include <cstdint>
#include <vector>

#include "csvrptw/core/instance.hpp"
#include "csvrptw/core/penalty.hpp"
#include "csvrptw/lp/knapsack.hpp"
#include "csvrptw/pricing/duals.hpp"
#include "csvrptw/pricing/label.hpp"

namespace csvrptw {

// Knapsack completion bound for a label ending at `last` with load `load`
// and earliest service start `tau`: item value = gamma_j minus the floor
// term, item weight = demand, capacity = residual load, visited customers
// excluded. The negated fractional optimum lower-bounds the reduced-cost
// decrease of any completion, and only positive values enter, so the
// result is always <= 0.
template <class FloorFn>
double knapsack_completion_bound(const Instance& inst, const Duals& duals, int last, int load,
                                 double tau, std::uint64_t visited, FloorFn&& floor_term) {
    const auto n_cust = static_cast<std::size_t>(inst.n_customers);
    std::vector<double> values(n_cust), weights(n_cust);
    std::vector<char> excluded(n_cust, 0);
    for (std::size_t j = 1; j <= n_cust; ++j) {
        values[j - 1] = duals.gamma[j] - floor_term(last, static_cast<int>(j), tau);
        weights[j - 1] = inst.demand[j];
        if ((visited >> j) & 1u) excluded[j - 1] = 1;
    }
    const double cap = static_cast<double>(inst.capacity - load);
    return -fractional_knapsack(values, weights, cap, excluded).value;
}

// Scenario form: the floor term is the penalty at the earliest conceivable
// arrival tau + min over scenarios of the arc time.
inline double knapsack_bound(const Label& lab, const Duals& duals, const Mat& min_t,
                             const PenaltyFn& pen, const Instance& inst) {
    return knapsack_completion_bound(
        inst, duals, lab.last, lab.load, lab.tau, lab.visited,
        [&](int i, int j, double tau) {
            return pen(tau + min_t(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) -
                       inst.due[static_cast<std::size_t>(j)]);
        });
}

inline double knapsack_bound(const Label& lab, const Duals& duals, const ScenarioSet& scen,
                             const PenaltyFn& pen, const Instance& inst) {
    return knapsack_bound(lab, duals, scenario_min(scen.scenarios), pen, inst);
}

}  // namespace csvrptw
