#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "csvrptw/core/error.hpp"
#include "csvrptw/core/instance.hpp"
#include "csvrptw/core/rng.hpp"
#include "csvrptw/core/route.hpp"
#include "csvrptw/datagen/covariance.hpp"

namespace csvrptw {

// Multivariate least squares T ~ X B fitted jointly over all arcs. Column a
// of coef carries the coefficients of the arc at position a in ArcIndex
// order, so predict() returns a travel-time vector in the same layout.
struct OlsModel {
    Eigen::MatrixXd coef;  // p x |A|
    Eigen::Index n = 0;
    Eigen::Index p = 0;

    Eigen::VectorXd predict(const Eigen::VectorXd& x) const {
        if (x.size() != coef.rows())
            throw ValidationError("OLS predict: feature dimension mismatch");
        return coef.transpose() * x;
    }
};

inline OlsModel fit_ols(const Eigen::MatrixXd& X, const Eigen::MatrixXd& T) {
    if (X.rows() != T.rows()) throw ValidationError("fit_ols: X/T row count mismatch");
    if (X.rows() <= X.cols()) throw ValidationError("fit_ols: needs n > p rows");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols()) throw NumericError("fit_ols: design matrix is rank deficient");
    OlsModel m;
    m.coef = qr.solve(T);
    m.n = X.rows();
    m.p = X.cols();
    return m;
}

// Residual covariance (T'T - B'X'T)/(n-p). The estimator can be indefinite
// at small n-p, so the matrix is symmetrized and the spectrum lifted by
// delta*I, delta = max(0, 1e-10 - lambda_min), before anyone factorizes it.
struct CovEstimate {
    Eigen::MatrixXd sigma;  // |A| x |A|, symmetric, lambda_min >= 1e-10
    Eigen::Index dof = 0;   // n - p
};

inline CovEstimate estimate_cov(const Eigen::MatrixXd& X, const Eigen::MatrixXd& T,
                                const OlsModel& ols) {
    if (X.rows() != T.rows()) throw ValidationError("estimate_cov: X/T row count mismatch");
    if (X.cols() != ols.p || T.cols() != ols.coef.cols())
        throw ValidationError("estimate_cov: shape does not match the fitted model");
    if (X.rows() <= X.cols())
        throw ValidationError("estimate_cov: no degrees of freedom (n <= p)");
    const double dof = static_cast<double>(X.rows() - X.cols());
    Eigen::MatrixXd s =
        (T.transpose() * T - ols.coef.transpose() * (X.transpose() * T)) / dof;
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericError("estimate_cov: eigenvalue computation failed");
    const double lift = std::max(0.0, 1e-10 - es.eigenvalues().minCoeff());
    if (lift > 0.0) s.diagonal().array() += lift;
    return {std::move(s), X.rows() - X.cols()};
}

namespace detail {

// Arc vector -> scenario matrix, clamped entrywise at the nominal times.
inline Mat clamped_scenario(const Instance& inst, const Eigen::VectorXd& t) {
    const ArcIndex ix = inst.arc_index();
    if (t.size() != static_cast<Eigen::Index>(ix.arc_count()))
        throw ValidationError("scenario vector length does not match the instance");
    Mat sc(ix.n_nodes(), ix.n_nodes(), 0.0);
    for (std::size_t a = 0; a < ix.arc_count(); ++a) {
        auto [i, j] = ix.arc(a);
        sc(i, j) = std::max(inst.nominal(i, j), t(static_cast<Eigen::Index>(a)));
    }
    return sc;
}

}  // namespace detail

// count i.i.d. draws from N(B'x, Sigma) with uniform weights. Draws are
// clamped at the nominal travel times, so the set always validates.
inline ScenarioSet sample_conditional_scenarios(const OlsModel& ols, const CovEstimate& cov,
                                                const Instance& inst, const Eigen::VectorXd& x,
                                                int count, std::uint64_t seed) {
    if (count < 1) throw ValidationError("scenario count must be positive");
    const auto arcs = static_cast<Eigen::Index>(inst.arc_index().arc_count());
    if (ols.coef.cols() != arcs || cov.sigma.rows() != arcs)
        throw ValidationError("model arc count does not match the instance");
    const Eigen::VectorXd mean = ols.predict(x);
    const Eigen::MatrixXd chol = covariance_factor(cov.sigma);
    std::mt19937_64 rng = make_rng(seed);
    std::normal_distribution<double> norm(0.0, 1.0);
    std::vector<Mat> draws;
    draws.reserve(static_cast<std::size_t>(count));
    Eigen::VectorXd z(arcs);
    for (int w = 0; w < count; ++w) {
        for (Eigen::Index a = 0; a < arcs; ++a) z(a) = norm(rng);
        draws.push_back(detail::clamped_scenario(inst, mean + chol * z));
    }
    return ScenarioSet::uniform(std::move(draws));
}

// Point prediction as a travel-time matrix, clamped at the nominal times.
// This is the single-scenario input used by the point-based methods and the
// t_hat source for penalty features.
inline Mat predict_matrix(const OlsModel& ols, const Instance& inst, const Eigen::VectorXd& x) {
    return detail::clamped_scenario(inst, ols.predict(x));
}

// One scenario per training row: the prediction at x_new shifted by that
// row's residual eps_k = B'x_k - t_k (prediction minus observation). The
// default adds eps_k; flip_residual_sign subtracts it, which turns the set
// into the conventional perturbation B'x_new + (t_k - B'x_k).
inline ScenarioSet residual_scenarios(const OlsModel& ols, const Eigen::MatrixXd& X,
                                      const Eigen::MatrixXd& T, const Instance& inst,
                                      const Eigen::VectorXd& x_new,
                                      bool flip_residual_sign = false) {
    if (X.rows() != T.rows() || X.rows() == 0)
        throw ValidationError("residual_scenarios: bad training data shape");
    if (X.cols() != ols.p || T.cols() != ols.coef.cols())
        throw ValidationError("residual_scenarios: shape does not match the fitted model");
    const Eigen::VectorXd g_new = ols.predict(x_new);
    const Eigen::MatrixXd fitted = X * ols.coef;  // row k = prediction at x_k
    std::vector<Mat> draws;
    draws.reserve(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index k = 0; k < X.rows(); ++k) {
        const Eigen::VectorXd eps = (fitted.row(k) - T.row(k)).transpose();
        const Eigen::VectorXd t = flip_residual_sign ? (g_new - eps).eval() : (g_new + eps).eval();
        draws.push_back(detail::clamped_scenario(inst, t));
    }
    return ScenarioSet::uniform(std::move(draws));
}

}  // namespace csvrptw
