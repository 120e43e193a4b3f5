#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "csvrptw/datagen/generative.hpp"

namespace csvrptw {

namespace detail {

// %.17g survives a text round-trip for any double.
inline std::string csv_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << csv_double(m(i, j));
        }
        out << '\n';
    }
}

inline Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(path + ": ragged csv row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path + ": empty csv");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

}  // namespace detail

// Layout under dir: X.csv (n x p), T.csv (n x |A|, row-major arc order),
// manifest.json with provenance.
inline void write_dataset(const Dataset& d, const std::string& dir,
                          const std::string& instance_name = "") {
    std::filesystem::create_directories(dir);
    detail::write_matrix_csv(dir + "/X.csv", d.x);
    detail::write_matrix_csv(dir + "/T.csv", d.t);
    nlohmann::json manifest{{"model", model_kind_name(d.kind)},
                            {"seed", d.seed},
                            {"n", d.n()},
                            {"p", d.p()},
                            {"arc_count", d.t.cols()},
                            {"instance", instance_name}};
    std::ofstream out(dir + "/manifest.json");
    out << manifest.dump(2) << '\n';
}

inline Dataset read_dataset(const std::string& dir) {
    Dataset d;
    d.x = detail::read_matrix_csv(dir + "/X.csv");
    d.t = detail::read_matrix_csv(dir + "/T.csv");
    std::ifstream in(dir + "/manifest.json");
    if (!in) throw ConfigError("cannot read " + dir + "/manifest.json");
    nlohmann::json manifest = nlohmann::json::parse(in);
    d.kind = model_kind_from_name(manifest.at("model").get<std::string>());
    d.seed = manifest.at("seed").get<std::uint64_t>();
    if (d.x.rows() != d.t.rows()) throw ParseError(dir + ": X/T row mismatch");
    if (manifest.at("n").get<int>() != d.n() || manifest.at("p").get<int>() != d.p())
        throw ParseError(dir + ": manifest shape mismatch");
    return d;
}

}  // namespace csvrptw
