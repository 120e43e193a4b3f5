#pragma once

#include <Eigen/Dense>
#include <vector>

#include "csvrptw/core/instance.hpp"
#include "csvrptw/core/penalty.hpp"
#include "csvrptw/core/route.hpp"
#include "csvrptw/learn/mlp.hpp"
#include "csvrptw/learn/ols.hpp"
#include "csvrptw/penalty_model/early.hpp"
#include "csvrptw/penalty_model/fpf.hpp"
#include "csvrptw/penalty_model/risk.hpp"

namespace csvrptw {

// Everything needed to turn (route, customer) into a predicted late-arrival
// penalty for one fixed context x: the projection inputs plus the trained
// network. The per-customer predictions are nonnegative by the network's
// inference clamp, which the prediction-free pricing relaxation relies on.
struct PenaltyPredictor {
    Eigen::VectorXd x;
    Mat t_hat;
    CovEstimate cov;
    EarlyArrivalModel early;
    MlpModel mlp;
    PenaltyFn pen;

    // Feature rows for every position of r, identical to the training-row
    // construction.
    std::vector<Eigen::VectorXd> project_route(const Instance& inst, const Route& r) const {
        const std::vector<double> a_free = arrival_times(inst, r, inst.nominal);
        const std::vector<double> a_hat = arrival_times(inst, r, t_hat);
        std::vector<double> probs(r.seq.size());
        for (std::size_t pos = 0; pos < r.seq.size(); ++pos) {
            const Eigen::VectorXd w = early_covariates(x, inst, r, pos, t_hat, cov);
            probs[pos] = estimate_early_arrival(inst, r, pos, early, w);
        }
        const RiskState risk = propagate_risk(r, inst, cov.sigma, probs);
        std::vector<Eigen::VectorXd> rows;
        rows.reserve(r.seq.size());
        for (std::size_t pos = 0; pos < r.seq.size(); ++pos) {
            FpfPoint pt;
            pt.node = r.seq[pos];
            pt.prev = pos == 0 ? 0 : r.seq[pos - 1];
            pt.position = static_cast<int>(pos) + 1;
            pt.a_free = a_free[pos];
            pt.a_hat = a_hat[pos];
            pt.xi = risk.xi[pos];
            rows.push_back(fpf_features(x, inst, pen, t_hat, cov, pt));
        }
        return rows;
    }

    // Sum of predicted penalties along r, the second-stage surrogate.
    double route_sum(const Instance& inst, const Route& r) const {
        double s = 0.0;
        for (const Eigen::VectorXd& y : project_route(inst, r)) s += mlp.predict(y);
        return s;
    }
};

inline PenaltyPredictor make_penalty_predictor(const Instance& inst, const Eigen::VectorXd& x,
                                               const OlsModel& ols, const CovEstimate& cov,
                                               const EarlyArrivalModel& early,
                                               const MlpModel& mlp, const PenaltyFn& pen) {
    PenaltyPredictor p;
    p.x = x;
    p.t_hat = predict_matrix(ols, inst, x);
    p.cov = cov;
    p.early = early;
    p.mlp = mlp;
    p.pen = pen;
    return p;
}

}  // namespace csvrptw
