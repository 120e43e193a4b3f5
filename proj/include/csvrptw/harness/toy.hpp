#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "csvrptw/core/instance.hpp"
#include "csvrptw/core/rng.hpp"

namespace csvrptw {

struct ToyOptions {
    int n_customers = 5;
    int n_vehicles = 3;
    double box = 60.0;          // coordinate square side
    double horizon = 150.0;     // latest customer window start scale
    int max_demand = 8;
    double capacity_slack = 1.5;  // Q >= slack * sum(q) / K keeps partitions feasible
};

// Small random instances for oracle comparisons and property tests.
// Windows are moderately tight; capacity is scaled so a partition into at
// most K routes always exists.
inline Instance random_toy_instance(std::uint64_t seed, const ToyOptions& opt = {}) {
    std::mt19937_64 rng = make_rng(seed);
    std::uniform_real_distribution<double> box(0.0, opt.box);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> dem(1, opt.max_demand);

    Instance inst;
    inst.name = "toy" + std::to_string(seed) + "_" + std::to_string(opt.n_customers);
    inst.n_customers = opt.n_customers;
    inst.n_vehicles = opt.n_vehicles;
    const std::size_t n = static_cast<std::size_t>(opt.n_customers) + 1;
    inst.x.resize(n);
    inst.y.resize(n);
    inst.demand.assign(n, 0);
    inst.ready.assign(n, 0.0);
    inst.due.assign(n, 0.0);
    inst.service.assign(n, 0.0);
    int total_demand = 0;
    for (std::size_t i = 0; i < n; ++i) {
        inst.x[i] = box(rng);
        inst.y[i] = box(rng);
        if (i > 0) {
            inst.demand[i] = dem(rng);
            total_demand += inst.demand[i];
            inst.ready[i] = unif(rng) * 0.5 * opt.horizon;
            inst.due[i] = inst.ready[i] + (0.15 + 0.35 * unif(rng)) * opt.horizon;
        }
    }
    inst.due[0] = 4.0 * opt.horizon;
    inst.capacity = std::max(opt.max_demand,
                             static_cast<int>(std::ceil(opt.capacity_slack * total_demand /
                                                        std::max(1, opt.n_vehicles))));
    inst.cost = euclidean_costs(inst.x, inst.y);
    inst.nominal = inst.cost;
    inst.validate();
    return inst;
}

}  // namespace csvrptw
