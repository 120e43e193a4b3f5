#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "csvrptw/core/instance.hpp"
#include "csvrptw/core/rng.hpp"

namespace csvrptw {

// Rostami-style arc-noise covariance for the linear travel-time model:
//   Sigma = D * C * D,  D = diag(0.1 * nominal_ij),
//   C = (F F' + 0.5 I) rescaled to unit diagonal,
// where F is |A| x r (r = ceil(|A|/10)); column l of F has U(0,1) entries on
// arcs touching the l-th cluster seed node and zeros elsewhere. Arcs sharing
// a seed node share factors, so noise is correlated around nodes while
// per-arc standard deviation stays at 10% of the nominal time.
inline Eigen::MatrixXd build_covariance(const Instance& inst, std::uint64_t seed) {
    const ArcIndex ix = inst.arc_index();
    const std::size_t na = ix.arc_count();
    const std::size_t nn = static_cast<std::size_t>(inst.n_nodes());
    const std::size_t r = (na + 9) / 10;

    std::mt19937_64 rng = make_rng(derive_seed(seed, "covariance"));
    std::uniform_int_distribution<std::size_t> node(0, nn - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(na),
                                              static_cast<Eigen::Index>(r));
    for (std::size_t l = 0; l < r; ++l) {
        const std::size_t s = node(rng);
        for (std::size_t a = 0; a < na; ++a) {
            auto [i, j] = ix.arc(a);
            if (i == s || j == s) f(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(l)) = unif(rng);
        }
    }

    Eigen::MatrixXd c = f * f.transpose();
    c.diagonal().array() += 0.5;
    Eigen::VectorXd scale = c.diagonal().array().sqrt().inverse();
    c = scale.asDiagonal() * c * scale.asDiagonal();

    Eigen::VectorXd d(static_cast<Eigen::Index>(na));
    for (std::size_t a = 0; a < na; ++a) {
        auto [i, j] = ix.arc(a);
        d(static_cast<Eigen::Index>(a)) = 0.1 * inst.nominal(i, j);
    }
    return d.asDiagonal() * c * d.asDiagonal();
}

// Lower Cholesky-like factor L with Sigma = L L'. Arcs with zero nominal
// time have zero variance, so the factorization runs on the positive block.
inline Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& sigma) {
    const Eigen::Index n = sigma.rows();
    std::vector<Eigen::Index> pos;
    for (Eigen::Index a = 0; a < n; ++a)
        if (sigma(a, a) > 0.0) pos.push_back(a);
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(pos.size()), static_cast<Eigen::Index>(pos.size()));
    for (std::size_t i = 0; i < pos.size(); ++i)
        for (std::size_t j = 0; j < pos.size(); ++j)
            sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sigma(pos[i], pos[j]);
    Eigen::LLT<Eigen::MatrixXd> llt(sub);
    if (llt.info() != Eigen::Success) {
        sub.diagonal().array() += 1e-10;
        llt.compute(sub);
        if (llt.info() != Eigen::Success)
            throw NumericError("covariance factorization failed after jitter");
    }
    Eigen::MatrixXd lsub = llt.matrixL();
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < pos.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            l(pos[i], pos[j]) = lsub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    return l;
}

}  // namespace csvrptw
