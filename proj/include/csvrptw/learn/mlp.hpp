#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "csvrptw/core/error.hpp"
#include "csvrptw/core/rng.hpp"

namespace csvrptw {

struct MlpHyper {
    std::vector<int> hidden = {100, 100};
    double lr = 1e-3;
    int epochs = 2000;
    double l2 = 0.1;  // coefficient on the squared norm of all parameters
    std::uint64_t seed = 0;
};

// Fully-connected ReLU network with a linear output unit. Inputs are
// z-scored with statistics frozen at fit time; training minimizes mean
// squared error plus l2 * ||params||^2 where params covers every weight
// and bias. Inference clamps the output at zero so predictions stay valid
// penalties.
struct MlpModel {
    std::vector<Eigen::MatrixXd> W;  // W[l]: (out x in)
    std::vector<Eigen::VectorXd> b;
    Eigen::RowVectorXd in_mean;      // input standardization, constant cols -> unit scale
    Eigen::RowVectorXd in_scale;
    double l2 = 0.1;
    double initial_loss = 0.0;
    double final_loss = 0.0;

    double raw(const Eigen::VectorXd& y) const {
        Eigen::VectorXd z = (y.transpose() - in_mean).cwiseQuotient(in_scale).transpose();
        for (std::size_t l = 0; l + 1 < W.size(); ++l)
            z = ((W[l] * z + b[l]).array().max(0.0)).matrix();
        return (W.back() * z + b.back())(0);
    }

    double predict(const Eigen::VectorXd& y) const { return std::max(0.0, raw(y)); }
};

// Identically-zero network (raw output 0, so predict is 0 everywhere).
// Fallback predictor for degenerate training sets with no positive targets.
inline MlpModel zero_mlp(Eigen::Index in_dim) {
    MlpModel m;
    m.W = {Eigen::MatrixXd::Zero(1, in_dim)};
    m.b = {Eigen::VectorXd::Zero(1)};
    m.in_mean = Eigen::RowVectorXd::Zero(in_dim);
    m.in_scale = Eigen::RowVectorXd::Ones(in_dim);
    m.l2 = 0.0;
    return m;
}

namespace detail {

inline Eigen::MatrixXd mlp_standardize(const MlpModel& m, const Eigen::MatrixXd& Y) {
    return (Y.rowwise() - m.in_mean).array().rowwise() / m.in_scale.array();
}

// Forward pass that keeps the preactivations needed by backprop.
struct MlpForward {
    std::vector<Eigen::MatrixXd> z;  // z[0] standardized input, z[l+1] = relu output
    std::vector<Eigen::MatrixXd> s;  // preactivations per layer
    Eigen::VectorXd out;             // linear outputs, one per row
};

inline MlpForward mlp_forward(const MlpModel& m, const Eigen::MatrixXd& Y) {
    MlpForward f;
    f.z.resize(m.W.size());
    f.s.resize(m.W.size());
    f.z[0] = mlp_standardize(m, Y);
    for (std::size_t l = 0; l < m.W.size(); ++l) {
        f.s[l] = (f.z[l] * m.W[l].transpose()).rowwise() + m.b[l].transpose();
        if (l + 1 < m.W.size()) f.z[l + 1] = f.s[l].array().max(0.0).matrix();
    }
    f.out = f.s.back().col(0);
    return f;
}

inline Eigen::Index mlp_param_count(const MlpModel& m) {
    Eigen::Index n = 0;
    for (std::size_t l = 0; l < m.W.size(); ++l) n += m.W[l].size() + m.b[l].size();
    return n;
}

}  // namespace detail

// Row-major flattening (W0, b0, W1, b1, ...) shared by the Adam state and
// the finite-difference oracle.
inline Eigen::VectorXd mlp_pack(const MlpModel& m) {
    Eigen::VectorXd v(detail::mlp_param_count(m));
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < m.W.size(); ++l) {
        for (Eigen::Index r = 0; r < m.W[l].rows(); ++r)
            for (Eigen::Index c = 0; c < m.W[l].cols(); ++c) v(at++) = m.W[l](r, c);
        for (Eigen::Index r = 0; r < m.b[l].size(); ++r) v(at++) = m.b[l](r);
    }
    return v;
}

inline void mlp_unpack(MlpModel& m, const Eigen::VectorXd& v) {
    if (v.size() != detail::mlp_param_count(m))
        throw ValidationError("mlp_unpack: parameter count mismatch");
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < m.W.size(); ++l) {
        for (Eigen::Index r = 0; r < m.W[l].rows(); ++r)
            for (Eigen::Index c = 0; c < m.W[l].cols(); ++c) m.W[l](r, c) = v(at++);
        for (Eigen::Index r = 0; r < m.b[l].size(); ++r) m.b[l](r) = v(at++);
    }
}

inline double mlp_loss(const MlpModel& m, const Eigen::MatrixXd& Y, const Eigen::VectorXd& pi) {
    const Eigen::VectorXd out = detail::mlp_forward(m, Y).out;
    double reg = 0.0;
    for (std::size_t l = 0; l < m.W.size(); ++l)
        reg += m.W[l].squaredNorm() + m.b[l].squaredNorm();
    return (out - pi).squaredNorm() / static_cast<double>(Y.rows()) + m.l2 * reg;
}

inline Eigen::VectorXd mlp_gradient(const MlpModel& m, const Eigen::MatrixXd& Y,
                                    const Eigen::VectorXd& pi) {
    const detail::MlpForward f = detail::mlp_forward(m, Y);
    const std::size_t L = m.W.size();
    // g holds dLoss/dS_l for the layer being processed, shape (n x out_l)
    Eigen::MatrixXd g = (2.0 / static_cast<double>(Y.rows())) * (f.out - pi);
    std::vector<Eigen::MatrixXd> dW(L);
    std::vector<Eigen::VectorXd> db(L);
    for (std::size_t l = L; l-- > 0;) {
        dW[l] = g.transpose() * f.z[l] + 2.0 * m.l2 * m.W[l];
        db[l] = g.colwise().sum().transpose() + 2.0 * m.l2 * m.b[l];
        if (l > 0)
            g = ((g * m.W[l]).array() * (f.s[l - 1].array() > 0.0).cast<double>()).matrix();
    }
    MlpModel grad = m;
    grad.W = std::move(dW);
    grad.b = std::move(db);
    return mlp_pack(grad);
}

inline MlpModel fit_mlp(const Eigen::MatrixXd& Y, const Eigen::VectorXd& pi,
                        const MlpHyper& hyper) {
    if (Y.rows() < 1) throw ValidationError("fit_mlp: empty training set");
    if (pi.size() != Y.rows()) throw ValidationError("fit_mlp: target count mismatch");
    if ((pi.array() < 0.0).any()) throw ValidationError("fit_mlp: negative penalty target");
    if (!Y.allFinite() || !pi.allFinite()) throw ValidationError("fit_mlp: non-finite input");

    MlpModel m;
    m.l2 = hyper.l2;
    m.in_mean = Y.colwise().mean();
    m.in_scale.resize(Y.cols());
    const double denom = static_cast<double>(std::max<Eigen::Index>(1, Y.rows() - 1));
    for (Eigen::Index j = 0; j < Y.cols(); ++j) {
        const double var = (Y.col(j).array() - m.in_mean(j)).square().sum() / denom;
        m.in_scale(j) = var > 1e-24 ? std::sqrt(var) : 1.0;
    }

    std::vector<Eigen::Index> dims;
    dims.push_back(Y.cols());
    for (int h : hyper.hidden) {
        if (h < 1) throw ValidationError("fit_mlp: hidden width must be positive");
        dims.push_back(h);
    }
    dims.push_back(1);

    // He initialization: N(0, 2/fan_in) weights, zero biases, seeded.
    std::mt19937_64 rng = make_rng(derive_seed(hyper.seed, "mlp-init"));
    std::normal_distribution<double> norm(0.0, 1.0);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const double sd = std::sqrt(2.0 / static_cast<double>(dims[l]));
        Eigen::MatrixXd w(dims[l + 1], dims[l]);
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = sd * norm(rng);
        m.W.push_back(std::move(w));
        m.b.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
    }

    m.initial_loss = mlp_loss(m, Y, pi);

    // Full-batch Adam with the standard moment corrections.
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    Eigen::VectorXd theta = mlp_pack(m);
    Eigen::VectorXd mom = Eigen::VectorXd::Zero(theta.size());
    Eigen::VectorXd vel = Eigen::VectorXd::Zero(theta.size());
    for (int t = 1; t <= hyper.epochs; ++t) {
        const Eigen::VectorXd g = mlp_gradient(m, Y, pi);
        if (!g.allFinite()) throw NumericError("fit_mlp: training diverged (non-finite gradient)");
        mom = b1 * mom + (1.0 - b1) * g;
        vel = b2 * vel + (1.0 - b2) * g.cwiseProduct(g);
        const double c1 = 1.0 - std::pow(b1, t);
        const double c2 = 1.0 - std::pow(b2, t);
        theta -= hyper.lr * (mom / c1).cwiseQuotient(((vel / c2).cwiseSqrt().array() + eps).matrix());
        mlp_unpack(m, theta);
    }

    m.final_loss = mlp_loss(m, Y, pi);
    if (!std::isfinite(m.final_loss))
        throw NumericError("fit_mlp: training diverged (non-finite loss)");
    return m;
}

}  // namespace csvrptw
