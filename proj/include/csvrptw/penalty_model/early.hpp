#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "csvrptw/core/error.hpp"
#include "csvrptw/core/instance.hpp"
#include "csvrptw/core/route.hpp"
#include "csvrptw/learn/logit.hpp"
#include "csvrptw/learn/ols.hpp"

namespace csvrptw {

// Arc-cost sum from the depot through the customer at `pos` (0-based), so
// the value includes the arc into that customer. Any realized arrival is at
// least this large because travel times dominate costs.
inline double prefix_cost(const Instance& inst, const Route& r, std::size_t pos) {
    if (pos >= r.seq.size()) throw ValidationError("prefix_cost: position out of range");
    double c = inst.cost(0, static_cast<std::size_t>(r.seq[0]));
    for (std::size_t k = 1; k <= pos; ++k)
        c += inst.cost(static_cast<std::size_t>(r.seq[k - 1]),
                       static_cast<std::size_t>(r.seq[k]));
    return c;
}

// Latest window opening strictly before `pos`, the depot's 0 included. A
// predecessor that opens later than e_i forces the vehicle past e_i, which
// rules out an early arrival at i.
inline double max_prev_ready(const Instance& inst, const Route& r, std::size_t pos) {
    double m = inst.ready[0];
    for (std::size_t k = 0; k < pos; ++k)
        m = std::max(m, inst.ready[static_cast<std::size_t>(r.seq[k])]);
    return m;
}

inline std::vector<std::string> early_covariate_names(int p) {
    std::vector<std::string> n;
    for (int j = 1; j <= p; ++j) n.push_back("x" + std::to_string(j));
    n.insert(n.end(), {"ready_i", "arrival_predicted", "var_prev_i", "max_prev_ready",
                       "prefix_cost"});
    return n;
}

// Covariate vector for the early-arrival model, built from incremental
// quantities. Layout: [x(p), e_i, a(i; t_hat), var(prev->i), max prev e,
// prefix cost through i].
inline Eigen::VectorXd early_covariates_from(const Eigen::VectorXd& x, double ready_i,
                                             double arrival_hat, double var_prev,
                                             double max_prev_e, double prefix) {
    Eigen::VectorXd w(x.size() + 5);
    w.head(x.size()) = x;
    w(x.size()) = ready_i;
    w(x.size() + 1) = arrival_hat;
    w(x.size() + 2) = var_prev;
    w(x.size() + 3) = max_prev_e;
    w(x.size() + 4) = prefix;
    return w;
}

inline Eigen::VectorXd early_covariates(const Eigen::VectorXd& x, const Instance& inst,
                                        const Route& r, std::size_t pos, const Mat& t_hat,
                                        const CovEstimate& cov) {
    if (pos >= r.seq.size()) throw ValidationError("early_covariates: position out of range");
    const auto i = static_cast<std::size_t>(r.seq[pos]);
    const std::size_t prev = pos == 0 ? 0 : static_cast<std::size_t>(r.seq[pos - 1]);
    const ArcIndex ix = inst.arc_index();
    const auto arc = static_cast<Eigen::Index>(ix.index(prev, i));
    const std::vector<double> a = arrival_times(inst, r, t_hat);
    return early_covariates_from(x, inst.ready[i], a[pos], cov.sigma(arc, arc),
                                 max_prev_ready(inst, r, pos), prefix_cost(inst, r, pos));
}

// Per-customer early-arrival predictor: a fitted logit where the data
// supports one, otherwise a Laplace-smoothed base rate.
struct EarlyArrivalModel {
    struct PerCustomer {
        bool use_logit = false;
        LogitModel logit;
        double freq = 0.0;
        int n_rows = 0;
    };
    std::vector<PerCustomer> by_customer;  // index by customer id, slot 0 unused

    const PerCustomer& at(int customer) const {
        if (customer < 1 || static_cast<std::size_t>(customer) >= by_customer.size())
            throw ValidationError("early-arrival model: unknown customer");
        return by_customer[static_cast<std::size_t>(customer)];
    }
};

// Structural zeros come first; only when none fires does the learned model
// speak. All three rules are implied by travel times dominating costs and
// by waiting at window openings. The scalar form exists so the pricing
// labels can evaluate the rules without materializing a route.
inline double estimate_early_arrival_from(const Instance& inst, int customer, double prefix,
                                          double max_prev_e, const EarlyArrivalModel& model,
                                          const Eigen::VectorXd& w) {
    const auto i = static_cast<std::size_t>(customer);
    if (inst.ready[i] <= 0.0) return 0.0;
    if (prefix > inst.ready[i]) return 0.0;
    if (max_prev_e > inst.ready[i]) return 0.0;
    const EarlyArrivalModel::PerCustomer& pc = model.at(customer);
    return pc.use_logit ? pc.logit.predict(w) : pc.freq;
}

inline double estimate_early_arrival(const Instance& inst, const Route& r, std::size_t pos,
                                     const EarlyArrivalModel& model,
                                     const Eigen::VectorXd& w) {
    if (pos >= r.seq.size())
        throw ValidationError("estimate_early_arrival: position out of range");
    return estimate_early_arrival_from(inst, r.seq[pos], prefix_cost(inst, r, pos),
                                       max_prev_ready(inst, r, pos), model, w);
}

}  // namespace csvrptw
