#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "csvrptw/core/route.hpp"

namespace csvrptw {

struct OracleResult {
    bool feasible = false;
    Solution best;
    double value = std::numeric_limits<double>::infinity();
};

// Exact reference optimum for small instances: every load-feasible visiting
// order is enumerated to give each customer subset its best route, then a
// subset DP assembles the cheapest partition into at most K routes. The
// route metric is a callback so scenario averages and learned predictions
// share one oracle.
template <class RouteValueFn>
OracleResult brute_force_optimum(const Instance& inst, RouteValueFn&& route_value) {
    const int n = inst.n_customers;
    if (n < 1 || n > 8) throw ValidationError("brute force oracle handles 1..8 customers");
    const std::uint32_t full = (std::uint32_t{1} << n) - 1;
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> best_route(full + 1, inf);
    std::vector<std::vector<int>> best_seq(full + 1);

    // depth-first over elementary sequences, pruned by load
    Route r;
    std::uint32_t mask = 0;
    int load = 0;
    const std::function<void()> rec = [&]() {
        if (mask != 0) {
            const double v = route_value(static_cast<const Route&>(r));
            if (v < best_route[mask]) {
                best_route[mask] = v;
                best_seq[mask] = r.seq;
            }
        }
        for (int j = 1; j <= n; ++j) {
            const std::uint32_t bit = std::uint32_t{1} << (j - 1);
            if (mask & bit) continue;
            const int qj = inst.demand[static_cast<std::size_t>(j)];
            if (load + qj > inst.capacity) continue;
            r.seq.push_back(j);
            mask |= bit;
            load += qj;
            rec();
            r.seq.pop_back();
            mask &= ~bit;
            load -= qj;
        }
    };
    rec();

    const int k_max = std::min(inst.n_vehicles, n);
    std::vector<std::vector<double>> dp(static_cast<std::size_t>(k_max + 1),
                                        std::vector<double>(full + 1, inf));
    std::vector<std::vector<std::uint32_t>> pick(static_cast<std::size_t>(k_max + 1),
                                                 std::vector<std::uint32_t>(full + 1, 0));
    dp[0][0] = 0.0;
    for (int k = 1; k <= k_max; ++k)
        for (std::uint32_t s = 1; s <= full; ++s) {
            const std::uint32_t low = s & (~s + 1);
            for (std::uint32_t b = s; b != 0; b = (b - 1) & s) {
                if (!(b & low)) continue;  // the block owns the lowest customer
                if (best_route[b] == inf) continue;
                const double v = best_route[b] + dp[static_cast<std::size_t>(k - 1)][s ^ b];
                if (v < dp[static_cast<std::size_t>(k)][s]) {
                    dp[static_cast<std::size_t>(k)][s] = v;
                    pick[static_cast<std::size_t>(k)][s] = b;
                }
            }
        }

    OracleResult out;
    int k_best = -1;
    for (int k = 1; k <= k_max; ++k)
        if (dp[static_cast<std::size_t>(k)][full] < out.value) {
            out.value = dp[static_cast<std::size_t>(k)][full];
            k_best = k;
        }
    if (k_best < 0) return out;  // no load-feasible partition within the fleet

    out.feasible = true;
    std::uint32_t s = full;
    for (int k = k_best; k > 0; --k) {
        const std::uint32_t b = pick[static_cast<std::size_t>(k)][s];
        out.best.routes.push_back(Route{best_seq[b]});
        s ^= b;
    }
    out.best.validate(inst);
    return out;
}

inline OracleResult brute_force_scenario_optimum(const Instance& inst, const ScenarioSet& scen,
                                                 const PenaltyFn& pen) {
    return brute_force_optimum(inst, [&](const Route& r) {
        return route_cost(inst, r) + expected_route_penalty(inst, r, scen, pen);
    });
}

}  // namespace csvrptw
