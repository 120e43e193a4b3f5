#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <string>
#include <vector>

#include "csvrptw/core/error.hpp"
#include "csvrptw/core/instance.hpp"
#include "csvrptw/core/penalty.hpp"
#include "csvrptw/core/route.hpp"
#include "csvrptw/learn/ols.hpp"
#include "csvrptw/penalty_model/risk.hpp"

namespace csvrptw {

// Projected feature layout, one row per (route, customer) pair:
//   (a) the p raw covariates
//   (b) window and arc descriptors: e_i, l_i, l_prev, c_prev_i, var_prev_i,
//       position (1-based)
//   (c) free-flow arrival, service start, positive lateness, penalty
//   (d) the same four under predicted times, plus the predicted arc time
//       t_hat_prev_i
//   (e) service start risk xi
inline int fpf_dim(int p) { return p + 16; }

inline std::vector<std::string> fpf_names(int p) {
    std::vector<std::string> n;
    for (int j = 1; j <= p; ++j) n.push_back("x" + std::to_string(j));
    n.insert(n.end(), {"ready_i", "due_i", "due_prev", "cost_prev_i", "var_prev_i", "position",
                       "arrival_freeflow", "service_freeflow", "lateness_freeflow",
                       "penalty_freeflow", "t_hat_prev_i", "arrival_predicted",
                       "service_predicted", "lateness_predicted", "penalty_predicted",
                       "service_risk"});
    return n;
}

// Per-customer scalars that both the whole-route projection and the pricing
// extension step can assemble incrementally.
struct FpfPoint {
    int node = 0;        // customer id
    int prev = 0;        // predecessor on the route, depot = 0
    int position = 0;    // 1-based
    double a_free = 0.0; // arrival under nominal times
    double a_hat = 0.0;  // arrival under predicted times
    double xi = 0.0;     // service start risk at the customer
};

inline Eigen::VectorXd fpf_features(const Eigen::VectorXd& x, const Instance& inst,
                                    const PenaltyFn& pen, const Mat& t_hat,
                                    const CovEstimate& cov, const FpfPoint& pt) {
    const auto i = static_cast<std::size_t>(pt.node);
    const auto prev = static_cast<std::size_t>(pt.prev);
    const ArcIndex ix = inst.arc_index();
    const auto arc = static_cast<Eigen::Index>(ix.index(prev, i));
    const double due = inst.due[i];

    Eigen::VectorXd y(fpf_dim(static_cast<int>(x.size())));
    Eigen::Index at = 0;
    y.head(x.size()) = x;
    at += x.size();
    y(at++) = inst.ready[i];
    y(at++) = due;
    y(at++) = inst.due[prev];
    y(at++) = inst.cost(prev, i);
    y(at++) = cov.sigma(arc, arc);
    y(at++) = pt.position;
    y(at++) = pt.a_free;
    y(at++) = std::max(inst.ready[i], pt.a_free);
    y(at++) = std::max(0.0, pt.a_free - due);
    y(at++) = pen(pt.a_free - due);
    y(at++) = t_hat(prev, i);
    y(at++) = pt.a_hat;
    y(at++) = std::max(inst.ready[i], pt.a_hat);
    y(at++) = std::max(0.0, pt.a_hat - due);
    y(at++) = pen(pt.a_hat - due);
    y(at++) = pt.xi;
    return y;
}

// Feature row for one customer on a route. The risk state must align with
// the route's positions.
inline Eigen::VectorXd project(const Eigen::VectorXd& x, const Route& r, int customer,
                               const Instance& inst, const PenaltyFn& pen, const Mat& t_hat,
                               const CovEstimate& cov, const RiskState& risk) {
    const auto it = std::find(r.seq.begin(), r.seq.end(), customer);
    if (it == r.seq.end())
        throw ValidationError("project: customer " + std::to_string(customer) +
                              " is not on route " + r.str());
    if (risk.xi.size() != r.seq.size())
        throw ValidationError("project: risk state does not match the route");
    const auto pos = static_cast<std::size_t>(it - r.seq.begin());

    const std::vector<double> a_free = arrival_times(inst, r, inst.nominal);
    const std::vector<double> a_hat = arrival_times(inst, r, t_hat);
    FpfPoint pt;
    pt.node = customer;
    pt.prev = pos == 0 ? 0 : r.seq[pos - 1];
    pt.position = static_cast<int>(pos) + 1;
    pt.a_free = a_free[pos];
    pt.a_hat = a_hat[pos];
    pt.xi = risk.xi[pos];
    return fpf_features(x, inst, pen, t_hat, cov, pt);
}

}  // namespace csvrptw
