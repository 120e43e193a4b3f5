#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "csvrptw/core/instance.hpp"
#include "csvrptw/core/penalty.hpp"

namespace csvrptw {

// A route is the ordered customer sequence; the depot legs are implicit.
struct Route {
    std::vector<int> seq;

    bool operator==(const Route& o) const { return seq == o.seq; }
    bool operator<(const Route& o) const { return seq < o.seq; }

    std::string str() const {
        std::string s = "0";
        for (int v : seq) s += "-" + std::to_string(v);
        return s + "-0";
    }
};

inline int route_load(const Instance& inst, const Route& r) {
    int q = 0;
    for (int v : r.seq) q += inst.demand[static_cast<std::size_t>(v)];
    return q;
}

// First-stage transportation cost: depot leg out, inner legs, depot leg back.
inline double route_cost(const Instance& inst, const Route& r) {
    if (r.seq.empty()) return 0.0;
    double c = inst.cost(0, static_cast<std::size_t>(r.seq.front()));
    for (std::size_t k = 1; k < r.seq.size(); ++k)
        c += inst.cost(static_cast<std::size_t>(r.seq[k - 1]), static_cast<std::size_t>(r.seq[k]));
    c += inst.cost(static_cast<std::size_t>(r.seq.back()), 0);
    return c;
}

// Arrival recursion under a fixed travel-time matrix T:
//   a(v_1) = T[0,v_1]
//   a(v_k) = max(e_{v_{k-1}}, a(v_{k-1})) + T[v_{k-1}, v_k]
// Early arrivals wait (service cannot start before e), so the next leg
// departs at the service start s(v) = max(e_v, a(v)).
inline std::vector<double> arrival_times(const Instance& inst, const Route& r, const Mat& T) {
    std::vector<double> a(r.seq.size());
    if (r.seq.empty()) return a;
    a[0] = T(0, static_cast<std::size_t>(r.seq[0]));
    for (std::size_t k = 1; k < r.seq.size(); ++k) {
        const auto prev = static_cast<std::size_t>(r.seq[k - 1]);
        const double depart = std::max(inst.ready[prev], a[k - 1]);
        a[k] = depart + T(prev, static_cast<std::size_t>(r.seq[k]));
    }
    return a;
}

inline std::vector<double> service_starts(const Instance& inst, const Route& r, const Mat& T) {
    std::vector<double> s = arrival_times(inst, r, T);
    for (std::size_t k = 0; k < s.size(); ++k)
        s[k] = std::max(inst.ready[static_cast<std::size_t>(r.seq[k])], s[k]);
    return s;
}

// Sum of late-arrival penalties along the route under one scenario.
inline double route_penalty(const Instance& inst, const Route& r, const Mat& T,
                            const PenaltyFn& pen) {
    const std::vector<double> a = arrival_times(inst, r, T);
    double p = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        p += pen(a[k] - inst.due[static_cast<std::size_t>(r.seq[k])]);
    return p;
}

// Discrete scenario set with weights on the simplex.
struct ScenarioSet {
    std::vector<Mat> scenarios;       // each (N+1)x(N+1), zero diagonal
    std::vector<double> weights;      // nonnegative, sum 1 within 1e-12

    std::size_t size() const { return scenarios.size(); }

    static ScenarioSet uniform(std::vector<Mat> sc) {
        ScenarioSet s;
        s.weights.assign(sc.size(), sc.empty() ? 0.0 : 1.0 / static_cast<double>(sc.size()));
        s.scenarios = std::move(sc);
        return s;
    }

    void validate(const Instance& inst) const {
        if (scenarios.empty()) throw ValidationError("scenario set is empty");
        if (weights.size() != scenarios.size())
            throw ValidationError("scenario/weight count mismatch");
        const auto n = static_cast<std::size_t>(inst.n_nodes());
        double sum = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw ValidationError("negative scenario weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ValidationError("scenario weights sum to " + std::to_string(sum));
        for (const Mat& t : scenarios) {
            if (t.rows() != n || t.cols() != n)
                throw ValidationError("scenario shape mismatch");
            for (std::size_t i = 0; i < n; ++i) {
                if (t(i, i) != 0.0) throw ValidationError("scenario diagonal must be 0");
                for (std::size_t j = 0; j < n; ++j)
                    if (i != j && t(i, j) + 1e-9 < inst.nominal(i, j))
                        throw ValidationError("scenario entry below nominal travel time");
            }
        }
    }
};

inline double expected_route_penalty(const Instance& inst, const Route& r,
                                     const ScenarioSet& scen, const PenaltyFn& pen) {
    double p = 0.0;
    for (std::size_t w = 0; w < scen.size(); ++w)
        p += scen.weights[w] * route_penalty(inst, r, scen.scenarios[w], pen);
    return p;
}

struct Solution {
    std::vector<Route> routes;

    // Exactly-once cover with at most K routes, loads within capacity.
    void validate(const Instance& inst) const {
        if (routes.size() > static_cast<std::size_t>(inst.n_vehicles))
            throw ValidationError("solution uses more than K routes");
        std::vector<int> seen(static_cast<std::size_t>(inst.n_nodes()), 0);
        for (const Route& r : routes) {
            if (r.seq.empty()) throw ValidationError("solution contains an empty route");
            for (int v : r.seq) {
                if (v < 1 || v > inst.n_customers)
                    throw ValidationError("route visits unknown node " + std::to_string(v));
                ++seen[static_cast<std::size_t>(v)];
            }
            if (route_load(inst, r) > inst.capacity)
                throw ValidationError("route exceeds capacity: " + r.str());
        }
        for (int v = 1; v <= inst.n_customers; ++v)
            if (seen[static_cast<std::size_t>(v)] != 1)
                throw ValidationError("customer " + std::to_string(v) + " covered " +
                                      std::to_string(seen[static_cast<std::size_t>(v)]) +
                                      " times");
    }

    // Canonical form for structural comparison: routes sorted, orientation kept.
    Solution canonical() const {
        Solution s = *this;
        std::sort(s.routes.begin(), s.routes.end());
        return s;
    }

    bool same_structure(const Solution& o) const {
        return canonical().routes == o.canonical().routes;
    }
};

struct Objective {
    double first_stage = 0.0;        // C(z)
    double expected_penalty = 0.0;   // weighted second stage
    double total = 0.0;
};

// f(z, scenarios) = C(z) + sum_w alpha_w Q(z, t_w), reported split.
inline Objective solution_value(const Instance& inst, const Solution& sol,
                                const ScenarioSet& scen, const PenaltyFn& pen) {
    Objective obj;
    for (const Route& r : sol.routes) {
        obj.first_stage += route_cost(inst, r);
        obj.expected_penalty += expected_route_penalty(inst, r, scen, pen);
    }
    obj.total = obj.first_stage + obj.expected_penalty;
    return obj;
}

// Single-scenario value, used by the test-cost averages.
inline double solution_value_single(const Instance& inst, const Solution& sol, const Mat& t,
                                    const PenaltyFn& pen) {
    double v = 0.0;
    for (const Route& r : sol.routes)
        v += route_cost(inst, r) + route_penalty(inst, r, t, pen);
    return v;
}

}  // namespace csvrptw
