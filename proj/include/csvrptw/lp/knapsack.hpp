#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "csvrptw/core/error.hpp"

namespace csvrptw {

struct KnapsackResult {
    double value = 0.0;
    std::vector<double> z;
};

// LP relaxation of the 0/1 knapsack, solved greedily by value/weight ratio:
// maximize sum v_j z_j over 0 <= z_j <= 1, sum w_j z_j <= cap, excluded
// items pinned to 0. Nonpositive-value items stay at 0 (they cannot help a
// maximization with free exclusion), and the greedy fill leaves at most one
// fractional coordinate.
inline KnapsackResult fractional_knapsack(const std::vector<double>& values,
                                          const std::vector<double>& weights, double cap,
                                          const std::vector<char>& excluded = {}) {
    if (values.size() != weights.size())
        throw ValidationError("knapsack value/weight size mismatch");
    if (!excluded.empty() && excluded.size() != values.size())
        throw ValidationError("knapsack exclusion mask size mismatch");
    if (cap < 0.0) throw ValidationError("knapsack capacity must be nonnegative");

    KnapsackResult res;
    res.z.assign(values.size(), 0.0);

    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (weights[j] <= 0.0) throw ValidationError("knapsack weights must be positive");
        if (!excluded.empty() && excluded[j]) continue;
        if (values[j] > 0.0) order.push_back(j);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ra = values[a] / weights[a], rb = values[b] / weights[b];
        if (ra != rb) return ra > rb;
        return a < b;
    });

    double left = cap;
    for (std::size_t j : order) {
        if (left <= 0.0) break;
        const double take = std::min(1.0, left / weights[j]);
        res.z[j] = take;
        res.value += take * values[j];
        left -= take * weights[j];
    }
    return res;
}

}  // namespace csvrptw
