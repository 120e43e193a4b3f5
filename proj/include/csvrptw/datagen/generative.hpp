#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "csvrptw/core/instance.hpp"
#include "csvrptw/core/rng.hpp"
#include "csvrptw/datagen/covariance.hpp"

namespace csvrptw {

enum class ModelKind { linear, exponential, sigmoidal };

inline std::string model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::linear: return "linear";
        case ModelKind::exponential: return "exp";
        case ModelKind::sigmoidal: return "sigmoid";
    }
    return "?";
}

inline ModelKind model_kind_from_name(const std::string& s) {
    if (s == "linear" || s == "lin") return ModelKind::linear;
    if (s == "exp" || s == "exponential") return ModelKind::exponential;
    if (s == "sigmoid" || s == "sigmoidal") return ModelKind::sigmoidal;
    throw ConfigError("unknown generative model kind: " + s);
}

struct GenOptions {
    // Pin the coefficient of the intercept coordinate to 0. The illustrative
    // example uses this so every sigmoidal arc switches traffic state at the
    // midpoint of its single free feature.
    bool zero_intercept_coef = false;
};

// Feature-conditioned travel-time generator over one instance's arc set.
// Features follow the paper's convention x_1 = 1 (intercept coordinate);
// the sampled coordinates are 2..p. Column a of `b` is the arc coefficient
// vector b_ij.
struct GenerativeModel {
    ModelKind kind = ModelKind::linear;
    int p = 0;
    Eigen::MatrixXd b;            // p x |A|
    Eigen::MatrixXd sigma;        // |A| x |A|, linear kind only
    Eigen::MatrixXd sigma_chol;   // factor of sigma
    double sigma_eps = 0.0;       // log-normal scale, exp/sigmoid kinds
    std::uint64_t seed = 0;

    std::size_t arc_count() const { return static_cast<std::size_t>(b.cols()); }
};

// Structural parameters (b vectors, noise covariance) are fixed once per
// (instance, kind, p, seed); sampling afterwards is driven by caller rngs.
inline GenerativeModel make_generative_model(const Instance& inst, ModelKind kind, int p,
                                             std::uint64_t seed, const GenOptions& opt = {}) {
    if (p < 1) throw ConfigError("generative model needs p >= 1");
    GenerativeModel m;
    m.kind = kind;
    m.p = p;
    m.seed = seed;
    const ArcIndex ix = inst.arc_index();
    const auto na = static_cast<Eigen::Index>(ix.arc_count());
    m.b.resize(p, na);

    std::mt19937_64 rng = make_rng(derive_seed(seed, "genmodel-b"));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Eigen::Index a = 0; a < na; ++a) {
        auto [i, j] = ix.arc(static_cast<std::size_t>(a));
        for (int k = 0; k < p; ++k) {
            double v = 0.0;
            switch (kind) {
                case ModelKind::linear:
                    v = (0.01 + 0.19 * unif(rng)) * inst.nominal(i, j);
                    break;
                case ModelKind::exponential:
                    v = 0.1 + 0.2 * unif(rng);
                    if (unif(rng) < 0.2) v = -v;
                    break;
                case ModelKind::sigmoidal:
                    v = 0.3 + 0.5 * unif(rng);
                    if (unif(rng) < 0.2) v = -v;
                    break;
            }
            m.b(k, a) = v;
        }
        if (opt.zero_intercept_coef) m.b(0, a) = 0.0;
    }
    if (kind == ModelKind::linear) {
        m.sigma = build_covariance(inst, derive_seed(seed, "genmodel-cov"));
        m.sigma_chol = covariance_factor(m.sigma);
    } else {
        m.sigma_eps = kind == ModelKind::exponential ? 1.0 : 1.2;
    }
    return m;
}

// One feature vector: intercept plus Bernoulli(0.5) coordinates for the
// linear model, Uniform(0,1) otherwise.
inline Eigen::VectorXd sample_features(const GenerativeModel& m, std::mt19937_64& rng) {
    Eigen::VectorXd x(m.p);
    x(0) = 1.0;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 1; k < m.p; ++k)
        x(k) = m.kind == ModelKind::linear ? (unif(rng) < 0.5 ? 0.0 : 1.0) : unif(rng);
    return x;
}

namespace detail {

inline void check_features(const GenerativeModel& m, const Eigen::VectorXd& x) {
    if (x.size() != m.p) throw ValidationError("feature vector has wrong dimension");
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double v = x(k);
        if (m.kind == ModelKind::linear) {
            if (v != 0.0 && v != 1.0)
                throw ValidationError("linear model features must be binary");
        } else if (v < -1e-12 || v > 1.0 + 1e-12) {
            throw ValidationError("features must lie in the unit cube");
        }
    }
}

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace detail

// Deterministic cores: congestion given x with an explicit per-arc noise
// vector. The random samplers draw the noise and delegate here, tests can
// suppress it.
inline Mat sample_linear_with_noise(const GenerativeModel& m, const Instance& inst,
                                    const Eigen::VectorXd& x, const Eigen::VectorXd& eps) {
    detail::check_features(m, x);
    const ArcIndex ix = inst.arc_index();
    Mat t = inst.nominal;
    for (std::size_t a = 0; a < ix.arc_count(); ++a) {
        auto [i, j] = ix.arc(a);
        const auto ai = static_cast<Eigen::Index>(a);
        const double raw = inst.nominal(i, j) + m.b.col(ai).dot(x) + eps(ai);
        t(i, j) = std::max(inst.nominal(i, j), raw);  // truncation at the nominal
    }
    return t;
}

inline Mat sample_envelope_with_noise(const GenerativeModel& m, const Instance& inst,
                                      const Eigen::VectorXd& x, const Eigen::VectorXd& eps) {
    detail::check_features(m, x);
    const ArcIndex ix = inst.arc_index();
    Mat t = inst.nominal;
    for (std::size_t a = 0; a < ix.arc_count(); ++a) {
        auto [i, j] = ix.arc(a);
        const auto ai = static_cast<Eigen::Index>(a);
        const double bx = m.b.col(ai).dot(x);
        double congestion = 0.0;
        if (m.kind == ModelKind::exponential)
            congestion = 0.2 * inst.nominal(i, j) * std::exp(2.0 * bx);
        else
            congestion = inst.nominal(i, j) *
                         detail::logistic(32.0 * (0.5 * m.b.col(ai).sum() - bx));
        t(i, j) = inst.nominal(i, j) + congestion + eps(ai);
    }
    return t;
}

inline Mat sample_travel_times(const GenerativeModel& m, const Instance& inst,
                               const Eigen::VectorXd& x, std::mt19937_64& rng) {
    const auto na = static_cast<Eigen::Index>(m.arc_count());
    Eigen::VectorXd eps(na);
    if (m.kind == ModelKind::linear) {
        std::normal_distribution<double> norm(0.0, 1.0);
        Eigen::VectorXd z(na);
        for (Eigen::Index a = 0; a < na; ++a) z(a) = norm(rng);
        eps = m.sigma_chol * z;
        return sample_linear_with_noise(m, inst, x, eps);
    }
    std::normal_distribution<double> norm(0.0, m.sigma_eps);
    for (Eigen::Index a = 0; a < na; ++a) eps(a) = std::exp(norm(rng));
    return sample_envelope_with_noise(m, inst, x, eps);
}

struct Dataset {
    Eigen::MatrixXd x;  // n x p, intercept first column
    Eigen::MatrixXd t;  // n x |A|, arc order row-major by (i,j)
    ModelKind kind = ModelKind::linear;
    std::uint64_t seed = 0;

    int n() const { return static_cast<int>(x.rows()); }
    int p() const { return static_cast<int>(x.cols()); }
};

struct TestSet {
    std::vector<Eigen::VectorXd> features;       // the n_X observed contexts
    std::vector<std::vector<Mat>> times;         // per context, n_T matrices
};

inline Dataset make_dataset(const GenerativeModel& m, const Instance& inst, int n, int p,
                            std::uint64_t seed) {
    if (p != m.p) throw ConfigError("dataset p must match the generative model");
    if (n <= p) throw ConfigError("need n > p (low-dimensional data assumption)");
    Dataset d;
    d.kind = m.kind;
    d.seed = seed;
    const auto na = static_cast<Eigen::Index>(m.arc_count());
    d.x.resize(n, p);
    d.t.resize(n, na);

    std::mt19937_64 feat_rng = make_rng(derive_seed(seed, "dataset-x"));
    std::mt19937_64 noise_rng = make_rng(derive_seed(seed, "dataset-t"));
    for (int attempt = 0;; ++attempt) {
        for (int k = 0; k < n; ++k) d.x.row(k) = sample_features(m, feat_rng).transpose();
        if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(d.x).rank() == p) break;
        if (attempt >= 100)
            throw ValidationError("could not draw a full-column-rank feature matrix");
    }
    for (int k = 0; k < n; ++k) {
        const Mat t = sample_travel_times(m, inst, d.x.row(k).transpose(), noise_rng);
        const std::vector<double> v = to_arc_vector(t);
        for (Eigen::Index a = 0; a < na; ++a) d.t(k, a) = v[static_cast<std::size_t>(a)];
    }
    return d;
}

inline TestSet make_testset(const GenerativeModel& m, const Instance& inst, int n_x, int n_t,
                            std::uint64_t seed) {
    if (n_x < 1 || n_t < 1) throw ConfigError("test set sizes must be positive");
    TestSet ts;
    std::mt19937_64 feat_rng = make_rng(derive_seed(seed, "testset-x"));
    std::mt19937_64 noise_rng = make_rng(derive_seed(seed, "testset-t"));
    for (int k = 0; k < n_x; ++k) {
        ts.features.push_back(sample_features(m, feat_rng));
        std::vector<Mat> block;
        block.reserve(static_cast<std::size_t>(n_t));
        for (int s = 0; s < n_t; ++s)
            block.push_back(sample_travel_times(m, inst, ts.features.back(), noise_rng));
        ts.times.push_back(std::move(block));
    }
    return ts;
}

}  // namespace csvrptw
