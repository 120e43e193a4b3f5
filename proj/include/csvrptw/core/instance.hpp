#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "csvrptw/core/error.hpp"
#include "csvrptw/core/matrix.hpp"

namespace csvrptw {

// A CS-VRPTW instance. Node 0 is the depot; customers are 1..N.
//
// Invariants after validate():
//   - demand[0] == 0, customer demands are integers in [1, Q]
//   - ready[i] <= due[i] for all nodes
//   - cost has zero diagonal and satisfies the triangle inequality when
//     built from coordinates (unrounded Euclidean)
//   - nominal (the free-flow travel time t_lower) is cost plus the origin
//     node's service time folded into every outgoing arc, so any realized
//     travel time matrix T >= nominal also satisfies T >= cost
struct Instance {
    std::string name;
    int n_customers = 0;  // N
    int n_vehicles = 0;   // K
    int capacity = 0;     // Q

    std::vector<double> x, y;       // coordinates, size N+1 (may be empty for synthetic instances)
    std::vector<int> demand;        // size N+1
    std::vector<double> ready;      // e_i
    std::vector<double> due;        // l_i
    std::vector<double> service;    // folded into nominal, kept for round-trips

    Mat cost;     // c_ij, (N+1) x (N+1)
    Mat nominal;  // t_lower_ij

    int n_nodes() const { return n_customers + 1; }
    ArcIndex arc_index() const { return ArcIndex(static_cast<std::size_t>(n_nodes())); }

    double max_due() const {
        double m = 0.0;
        for (double d : due) m = std::max(m, d);
        return m;
    }

    void validate() const {
        const std::size_t n = static_cast<std::size_t>(n_nodes());
        if (n_customers < 1) throw ValidationError(name + ": instance needs at least one customer");
        if (n_vehicles < 1) throw ValidationError(name + ": fleet size must be positive");
        if (capacity < 1) throw ValidationError(name + ": capacity must be positive");
        auto check_size = [&](std::size_t got, const char* what) {
            if (got != n)
                throw ValidationError(name + ": " + what + " has size " + std::to_string(got) +
                                      ", expected " + std::to_string(n));
        };
        check_size(demand.size(), "demand");
        check_size(ready.size(), "ready");
        check_size(due.size(), "due");
        check_size(service.size(), "service");
        if (!x.empty()) check_size(x.size(), "x");
        if (!y.empty()) check_size(y.size(), "y");
        if (cost.rows() != n || cost.cols() != n)
            throw ValidationError(name + ": cost matrix shape mismatch");
        if (nominal.rows() != n || nominal.cols() != n)
            throw ValidationError(name + ": nominal matrix shape mismatch");

        if (demand[0] != 0) throw ValidationError(name + ": depot demand must be 0");
        for (std::size_t i = 1; i < n; ++i) {
            if (demand[i] < 1)
                throw ValidationError(name + ": customer " + std::to_string(i) +
                                      " must have demand >= 1 (capacity recursions assume it)");
            if (demand[i] > capacity)
                throw ValidationError(name + ": customer " + std::to_string(i) +
                                      " demand exceeds vehicle capacity");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (ready[i] > due[i])
                throw ValidationError(name + ": node " + std::to_string(i) +
                                      " has ready > due");
            if (cost(i, i) != 0.0 || nominal(i, i) != 0.0)
                throw ValidationError(name + ": diagonal travel entries must be 0");
            for (std::size_t j = 0; j < n; ++j) {
                if (cost(i, j) < 0.0 || nominal(i, j) < 0.0)
                    throw ValidationError(name + ": negative travel entry");
                if (i != j && nominal(i, j) + 1e-9 < cost(i, j))
                    throw ValidationError(name + ": nominal travel below cost on an arc");
            }
        }
    }
};

inline Mat euclidean_costs(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    Mat c(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) c(i, j) = std::hypot(x[i] - x[j], y[i] - y[j]);
    return c;
}

// nominal_ij = cost_ij + service_i on outgoing arcs of i. Folding service
// into the nominal (rather than the cost) keeps every scenario matrix above
// the cost matrix, which the pricing bounds use.
inline Mat fold_service(const Mat& cost, const std::vector<double>& service) {
    Mat t = cost;
    for (std::size_t i = 0; i < t.rows(); ++i)
        for (std::size_t j = 0; j < t.cols(); ++j)
            if (i != j) t(i, j) = cost(i, j) + service[i];
    return t;
}

}  // namespace csvrptw
