#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "csvrptw/core/error.hpp"

namespace csvrptw {

// k-nearest-neighbour regression with Euclidean distance on z-scored
// features. Centering cancels in pairwise differences, so only the column
// scales are stored; constant columns get unit scale and drop out.
struct KnnModel {
    Eigen::MatrixXd train;   // raw training features, n x p
    Eigen::RowVectorXd scale;
    int k = 1;
};

inline int default_knn_k(Eigen::Index n) {
    return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
}

inline KnnModel fit_knn(const Eigen::MatrixXd& X, int k) {
    if (X.rows() < 1) throw ValidationError("fit_knn: empty training set");
    if (k < 1 || k > X.rows())
        throw ValidationError("fit_knn: k must lie in [1, n]");
    KnnModel m;
    m.train = X;
    m.scale.resize(X.cols());
    const Eigen::RowVectorXd mean = X.colwise().mean();
    const double denom = static_cast<double>(std::max<Eigen::Index>(1, X.rows() - 1));
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double var = (X.col(j).array() - mean(j)).square().sum() / denom;
        m.scale(j) = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    m.k = k;
    return m;
}

// Row indices of the k nearest training points, distance ties broken by
// ascending row index (std::pair ordering gives exactly that).
inline std::vector<Eigen::Index> knn_neighbors(const KnnModel& m, const Eigen::VectorXd& x) {
    if (x.size() != m.train.cols())
        throw ValidationError("knn: query feature dimension mismatch");
    std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(m.train.rows()));
    for (Eigen::Index r = 0; r < m.train.rows(); ++r) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < m.train.cols(); ++j) {
            const double u = (m.train(r, j) - x(j)) / m.scale(j);
            s += u * u;
        }
        dist[static_cast<std::size_t>(r)] = {s, r};
    }
    std::partial_sort(dist.begin(), dist.begin() + m.k, dist.end());
    std::vector<Eigen::Index> out(static_cast<std::size_t>(m.k));
    for (int i = 0; i < m.k; ++i) out[static_cast<std::size_t>(i)] = dist[static_cast<std::size_t>(i)].second;
    return out;
}

// Probability vector over training rows: 1/k on the neighbours, 0 elsewhere.
inline Eigen::VectorXd knn_weights(const KnnModel& m, const Eigen::VectorXd& x) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m.train.rows());
    for (Eigen::Index r : knn_neighbors(m, x)) w(r) = 1.0 / static_cast<double>(m.k);
    return w;
}

// Mean of the neighbours' target rows (travel-time vectors in arc order).
inline Eigen::VectorXd knn_predict(const KnnModel& m, const Eigen::MatrixXd& T,
                                   const Eigen::VectorXd& x) {
    if (T.rows() != m.train.rows())
        throw ValidationError("knn_predict: target row count mismatch");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(T.cols());
    for (Eigen::Index r : knn_neighbors(m, x)) acc += T.row(r).transpose();
    return acc / static_cast<double>(m.k);
}

}  // namespace csvrptw
