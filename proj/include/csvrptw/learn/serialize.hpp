#pragma once

#include <Eigen/Dense>

#include "csvrptw/core/serialize.hpp"
#include "csvrptw/learn/knn.hpp"
#include "csvrptw/learn/logit.hpp"
#include "csvrptw/learn/mlp.hpp"
#include "csvrptw/learn/ols.hpp"

namespace csvrptw {

// Fitted models round-trip through JSON so the harness can cache them per
// experiment cell. Matrices are stored row-major with explicit shape.
inline json eigen_to_json(const Eigen::MatrixXd& m) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

inline Eigen::MatrixXd eigen_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw ParseError("matrix payload size does not match its shape");
    Eigen::MatrixXd m(rows, cols);
    std::size_t at = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[at++];
    return m;
}

inline json ols_to_json(const OlsModel& m) {
    return json{{"coef", eigen_to_json(m.coef)}, {"n", m.n}, {"p", m.p}};
}

inline OlsModel ols_from_json(const json& j) {
    OlsModel m;
    m.coef = eigen_from_json(j.at("coef"));
    m.n = j.at("n").get<Eigen::Index>();
    m.p = j.at("p").get<Eigen::Index>();
    return m;
}

inline json cov_to_json(const CovEstimate& c) {
    return json{{"sigma", eigen_to_json(c.sigma)}, {"dof", c.dof}};
}

inline CovEstimate cov_from_json(const json& j) {
    return {eigen_from_json(j.at("sigma")), j.at("dof").get<Eigen::Index>()};
}

inline json knn_to_json(const KnnModel& m) {
    return json{{"train", eigen_to_json(m.train)},
                {"scale", eigen_to_json(m.scale)},
                {"k", m.k}};
}

inline KnnModel knn_from_json(const json& j) {
    KnnModel m;
    m.train = eigen_from_json(j.at("train"));
    m.scale = eigen_from_json(j.at("scale"));
    m.k = j.at("k").get<int>();
    return m;
}

inline json mlp_to_json(const MlpModel& m) {
    json layers = json::array();
    for (std::size_t l = 0; l < m.W.size(); ++l)
        layers.push_back(json{{"W", eigen_to_json(m.W[l])}, {"b", eigen_to_json(m.b[l])}});
    return json{{"layers", layers},
                {"in_mean", eigen_to_json(m.in_mean)},
                {"in_scale", eigen_to_json(m.in_scale)},
                {"l2", m.l2},
                {"initial_loss", m.initial_loss},
                {"final_loss", m.final_loss}};
}

inline MlpModel mlp_from_json(const json& j) {
    MlpModel m;
    for (const json& layer : j.at("layers")) {
        m.W.push_back(eigen_from_json(layer.at("W")));
        m.b.push_back(eigen_from_json(layer.at("b")));
    }
    m.in_mean = eigen_from_json(j.at("in_mean"));
    m.in_scale = eigen_from_json(j.at("in_scale"));
    m.l2 = j.at("l2").get<double>();
    m.initial_loss = j.at("initial_loss").get<double>();
    m.final_loss = j.at("final_loss").get<double>();
    return m;
}

inline json logit_to_json(const LogitModel& m) {
    return json{{"intercept", m.intercept},
                {"coef", eigen_to_json(m.coef)},
                {"lambda", m.lambda},
                {"objective", m.objective},
                {"iterations", m.iterations}};
}

inline LogitModel logit_from_json(const json& j) {
    LogitModel m;
    m.intercept = j.at("intercept").get<double>();
    m.coef = eigen_from_json(j.at("coef"));
    m.lambda = j.at("lambda").get<double>();
    m.objective = j.at("objective").get<double>();
    m.iterations = j.at("iterations").get<int>();
    return m;
}

}  // namespace csvrptw
