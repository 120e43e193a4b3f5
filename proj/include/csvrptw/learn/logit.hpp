#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "csvrptw/core/error.hpp"

namespace csvrptw {

// L1-regularized logistic regression fitted by proximal gradient descent
// with backtracking line search. Objective: mean negative log-likelihood
// plus lambda * ||coef||_1; the intercept stays unpenalized.
struct LogitModel {
    double intercept = 0.0;
    Eigen::VectorXd coef;
    double lambda = 0.0;
    double objective = 0.0;
    int iterations = 0;

    double predict(const Eigen::VectorXd& w) const {
        if (w.size() != coef.size()) throw ValidationError("logit predict: dimension mismatch");
        return 1.0 / (1.0 + std::exp(-(intercept + coef.dot(w))));
    }
};

namespace detail {

// log(1 + e^z) evaluated without overflow.
inline double log1pexp(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

// Mean negative log-likelihood at logits z, labels y in {0,1}:
// sum_i [log(1+e^{z_i}) - y_i z_i] / n.
inline double logit_nll(const Eigen::VectorXd& z, const Eigen::VectorXd& y) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) s += log1pexp(z(i)) - y(i) * z(i);
    return s / static_cast<double>(z.size());
}

inline double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

}  // namespace detail

// trace, when given, receives the penalized objective after every accepted
// iterate (the initial point first).
inline LogitModel fit_logit_l1(const Eigen::MatrixXd& W, const std::vector<int>& labels,
                               double lambda, int max_iter = 2000, double tol = 1e-10,
                               std::vector<double>* trace = nullptr) {
    const Eigen::Index n = W.rows();
    if (n < 1) throw ValidationError("fit_logit_l1: empty training set");
    if (static_cast<Eigen::Index>(labels.size()) != n)
        throw ValidationError("fit_logit_l1: label count mismatch");
    if (lambda < 0.0) throw ValidationError("fit_logit_l1: negative lambda");
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (labels[static_cast<std::size_t>(i)] != 0 && labels[static_cast<std::size_t>(i)] != 1)
            throw ValidationError("fit_logit_l1: labels must be 0/1");
        y(i) = labels[static_cast<std::size_t>(i)];
    }

    LogitModel m;
    m.coef = Eigen::VectorXd::Zero(W.cols());
    m.lambda = lambda;

    auto logits = [&](double b0, const Eigen::VectorXd& beta) -> Eigen::VectorXd {
        return (W * beta).array() + b0;
    };

    double step = 1.0;
    Eigen::VectorXd z = logits(m.intercept, m.coef);
    double smooth = detail::logit_nll(z, y);
    double objective = smooth + lambda * m.coef.lpNorm<1>();
    if (trace) trace->push_back(objective);

    int it = 0;
    for (; it < max_iter; ++it) {
        // gradient of the smooth part: residual r = sigma(z) - y
        const Eigen::VectorXd r =
            (1.0 / (1.0 + (-z.array()).exp()) - y.array()).matrix() / static_cast<double>(n);
        const double g0 = r.sum();
        const Eigen::VectorXd g = W.transpose() * r;

        // backtracking: shrink until the quadratic upper model holds at the
        // proximal point, which makes the penalized objective monotone
        double cand_smooth = 0.0;
        double cand0 = 0.0;
        Eigen::VectorXd cand;
        Eigen::VectorXd cand_z;
        for (;;) {
            cand0 = m.intercept - step * g0;
            cand = (m.coef - step * g).unaryExpr(
                [&](double v) { return detail::soft_threshold(v, step * lambda); });
            cand_z = logits(cand0, cand);
            cand_smooth = detail::logit_nll(cand_z, y);
            const double d0 = cand0 - m.intercept;
            const Eigen::VectorXd d = cand - m.coef;
            const double quad =
                smooth + g0 * d0 + g.dot(d) + (d0 * d0 + d.squaredNorm()) / (2.0 * step);
            if (cand_smooth <= quad + 1e-15) break;
            step *= 0.5;
            if (step < 1e-18) break;
        }

        const double cand_obj = cand_smooth + lambda * cand.lpNorm<1>();
        if (!(cand_obj <= objective + 1e-12)) break;  // step collapsed, keep current point
        const double drop = objective - cand_obj;
        m.intercept = cand0;
        m.coef = cand;
        z = std::move(cand_z);
        smooth = cand_smooth;
        objective = cand_obj;
        if (trace) trace->push_back(objective);
        step = std::min(step * 2.0, 1e6);  // let the step size recover
        if (drop <= tol * std::max(1.0, std::abs(objective))) {
            ++it;
            break;
        }
    }

    m.objective = objective;
    m.iterations = it;
    return m;
}

}  // namespace csvrptw
