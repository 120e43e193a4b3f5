#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "csvrptw/core/instance.hpp"
#include "csvrptw/core/penalty.hpp"
#include "csvrptw/core/route.hpp"
#include "csvrptw/pricing/duals.hpp"

namespace csvrptw {

// Search state for one partial path from the depot. cbar always contains
// the return leg c_{last,0}, so a label is a complete candidate route at
// any time. starts holds the service start at `last` under every tracked
// travel-time matrix; tau is their minimum.
//
// Invariants: tau == min(starts); load <= capacity; bit v of visited is set
// exactly for the customers on the path; parent indexes the search arena
// (-1 for depot seeds).
struct Label {
    int last = 0;
    double cbar = 0.0;
    int load = 0;
    double tau = 0.0;
    std::vector<double> starts;
    std::uint64_t visited = 0;
    std::int32_t parent = -1;
};

// Entrywise minimum over the scenario matrices, the travel-time lower bound
// used by both completion bounds.
inline Mat scenario_min(const std::vector<Mat>& mats) {
    Mat m = mats.at(0);
    for (std::size_t w = 1; w < mats.size(); ++w)
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j)
                m(i, j) = std::min(m(i, j), mats[w](i, j));
    return m;
}

inline Mat scenario_min(const ScenarioSet& scen) { return scenario_min(scen.scenarios); }

// Depot seed for the singleton route (j). The fleet dual is charged here,
// once per route.
inline Label seed_label(int j, const ScenarioSet& scen, const Duals& duals,
                        const PenaltyFn& pen, const Instance& inst) {
    const auto ju = static_cast<std::size_t>(j);
    Label lab;
    lab.last = j;
    lab.load = inst.demand[ju];
    lab.visited = std::uint64_t{1} << ju;
    lab.parent = -1;
    lab.starts.resize(scen.size());
    lab.tau = std::numeric_limits<double>::infinity();
    double penalty = 0.0;
    for (std::size_t w = 0; w < scen.size(); ++w) {
        const double arrive = scen.scenarios[w](0, ju);
        penalty += scen.weights[w] * pen(arrive - inst.due[ju]);
        lab.starts[w] = std::max(inst.ready[ju], arrive);
        lab.tau = std::min(lab.tau, lab.starts[w]);
    }
    lab.cbar = -duals.mu + inst.cost(0, ju) + inst.cost(ju, 0) + penalty - duals.gamma[ju];
    return lab;
}

// Extension along (last, j). The reduced cost swaps the return leg for the
// new arc plus the new return leg, adds the weighted penalty at j, and
// credits gamma_j. Capacity overflow rejects the extension; the parent
// index is left for the search to assign.
inline std::optional<Label> extend_label(const Label& lab, int j, const ScenarioSet& scen,
                                         const Duals& duals, const PenaltyFn& pen,
                                         const Instance& inst) {
    const auto iu = static_cast<std::size_t>(lab.last);
    const auto ju = static_cast<std::size_t>(j);
    const int load = lab.load + inst.demand[ju];
    if (load > inst.capacity) return std::nullopt;

    Label next;
    next.last = j;
    next.load = load;
    next.visited = lab.visited | (std::uint64_t{1} << ju);
    next.parent = -1;
    next.starts.resize(scen.size());
    next.tau = std::numeric_limits<double>::infinity();
    double penalty = 0.0;
    for (std::size_t w = 0; w < scen.size(); ++w) {
        const double arrive = lab.starts[w] + scen.scenarios[w](iu, ju);
        penalty += scen.weights[w] * pen(arrive - inst.due[ju]);
        next.starts[w] = std::max(inst.ready[ju], arrive);
        next.tau = std::min(next.tau, next.starts[w]);
    }
    next.cbar = lab.cbar - inst.cost(iu, 0) + inst.cost(iu, ju) + inst.cost(ju, 0) + penalty -
                duals.gamma[ju];
    return next;
}

// Reduced cost of a complete route from scratch, the independent check for
// every emitted column.
inline double scenario_reduced_cost(const Route& r, const ScenarioSet& scen, const Duals& duals,
                                    const PenaltyFn& pen, const Instance& inst) {
    double c = route_cost(inst, r) + expected_route_penalty(inst, r, scen, pen) - duals.mu;
    for (int v : r.seq) c -= duals.gamma[static_cast<std::size_t>(v)];
    return c;
}

}  // namespace csvrptw
