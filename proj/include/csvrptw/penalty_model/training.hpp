#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "csvrptw/core/error.hpp"
#include "csvrptw/core/rng.hpp"
#include "csvrptw/datagen/io.hpp"
#include "csvrptw/penalty_model/early.hpp"
#include "csvrptw/penalty_model/fpf.hpp"

namespace csvrptw {

namespace detail {

// Route pools recorded during solves repeat columns across iterations;
// duplicates carry no extra signal for training.
inline std::vector<Route> dedupe_pool(const std::vector<Route>& pool) {
    std::set<std::vector<int>> seen;
    std::vector<Route> out;
    for (const Route& r : pool) {
        if (r.seq.empty()) continue;
        if (seen.insert(r.seq).second) out.push_back(r);
    }
    return out;
}

inline std::vector<Mat> period_matrices(const Eigen::MatrixXd& T, const Instance& inst) {
    const ArcIndex ix = inst.arc_index();
    if (T.cols() != static_cast<Eigen::Index>(ix.arc_count()))
        throw ValidationError("travel-time rows do not match the instance arc count");
    std::vector<Mat> out;
    out.reserve(static_cast<std::size_t>(T.rows()));
    for (Eigen::Index k = 0; k < T.rows(); ++k) {
        std::vector<double> row(ix.arc_count());
        for (std::size_t a = 0; a < row.size(); ++a) row[a] = T(k, static_cast<Eigen::Index>(a));
        out.push_back(from_arc_vector(row, ix.n_nodes()));
    }
    return out;
}

}  // namespace detail

// Per-customer covariate rows and early/on-time labels harvested from a
// route pool scored against every training period.
struct EarlyTrainingData {
    std::vector<Eigen::MatrixXd> W;          // by customer id, slot 0 empty
    std::vector<std::vector<int>> labels;
};

inline EarlyTrainingData build_early_training(const std::vector<Route>& pool,
                                              const Eigen::MatrixXd& X,
                                              const Eigen::MatrixXd& T, const Instance& inst,
                                              const OlsModel& ols, const CovEstimate& cov) {
    if (X.rows() != T.rows()) throw ValidationError("build_early_training: X/T row mismatch");
    const std::vector<Route> routes = detail::dedupe_pool(pool);
    if (routes.empty()) throw ValidationError("build_early_training: empty route pool");

    const auto n_nodes = static_cast<std::size_t>(inst.n_nodes());
    std::vector<std::vector<Eigen::VectorXd>> rows(n_nodes);
    std::vector<std::vector<int>> labels(n_nodes);

    std::vector<Mat> t_hat;
    t_hat.reserve(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index k = 0; k < X.rows(); ++k)
        t_hat.push_back(predict_matrix(ols, inst, X.row(k).transpose()));
    const std::vector<Mat> t_act = detail::period_matrices(T, inst);

    for (const Route& r : routes) {
        for (Eigen::Index k = 0; k < X.rows(); ++k) {
            const std::vector<double> a_hat = arrival_times(inst, r, t_hat[static_cast<std::size_t>(k)]);
            const std::vector<double> a_act = arrival_times(inst, r, t_act[static_cast<std::size_t>(k)]);
            for (std::size_t pos = 0; pos < r.seq.size(); ++pos) {
                const auto i = static_cast<std::size_t>(r.seq[pos]);
                const std::size_t prev = pos == 0 ? 0 : static_cast<std::size_t>(r.seq[pos - 1]);
                const auto arc = static_cast<Eigen::Index>(inst.arc_index().index(prev, i));
                rows[i].push_back(early_covariates_from(
                    X.row(k).transpose(), inst.ready[i], a_hat[pos], cov.sigma(arc, arc),
                    max_prev_ready(inst, r, pos), prefix_cost(inst, r, pos)));
                labels[i].push_back(a_act[pos] <= inst.ready[i] ? 1 : 0);
            }
        }
    }

    EarlyTrainingData out;
    out.W.resize(n_nodes);
    out.labels = std::move(labels);
    for (std::size_t i = 1; i < n_nodes; ++i) {
        out.W[i].resize(static_cast<Eigen::Index>(rows[i].size()), X.cols() + 5);
        for (std::size_t rix = 0; rix < rows[i].size(); ++rix)
            out.W[i].row(static_cast<Eigen::Index>(rix)) = rows[i][rix].transpose();
    }
    return out;
}

// Customers with thin or one-class data fall back to a Laplace-smoothed
// base rate; everyone else gets an L1 logit.
inline EarlyArrivalModel fit_early_arrival(const EarlyTrainingData& data, double lambda = 0.01,
                                           int min_rows = 20) {
    EarlyArrivalModel m;
    m.by_customer.resize(data.W.size());
    for (std::size_t i = 1; i < data.W.size(); ++i) {
        EarlyArrivalModel::PerCustomer& pc = m.by_customer[i];
        const auto n = static_cast<int>(data.labels[i].size());
        pc.n_rows = n;
        const int pos = std::accumulate(data.labels[i].begin(), data.labels[i].end(), 0);
        if (n < min_rows || pos == 0 || pos == n) {
            pc.use_logit = false;
            pc.freq = (pos + 1.0) / (n + 2.0);
        } else {
            pc.use_logit = true;
            pc.logit = fit_logit_l1(data.W[i], data.labels[i], lambda);
        }
    }
    return m;
}

struct PenaltyTrainingSet {
    Eigen::MatrixXd Y;       // n_bar x (p + 16)
    Eigen::VectorXd pi;      // nonnegative penalty targets
    std::string provenance;
};

// One row per (route, customer, period): projected features against the
// period's predicted times, target = realized penalty under the period's
// actual times. Zero-target rows are capped at max_zero_ratio times the
// positive count (seeded uniform subsample) to keep the regression from
// drowning in on-time visits.
inline PenaltyTrainingSet build_training_set(const std::vector<Route>& pool,
                                             const Eigen::MatrixXd& X, const Eigen::MatrixXd& T,
                                             const Instance& inst, const PenaltyFn& pen,
                                             const OlsModel& ols, const CovEstimate& cov,
                                             const EarlyArrivalModel& early,
                                             std::uint64_t seed, double max_zero_ratio = 3.0) {
    if (X.rows() != T.rows()) throw ValidationError("build_training_set: X/T row mismatch");
    const std::vector<Route> routes = detail::dedupe_pool(pool);
    if (routes.empty()) throw ValidationError("build_training_set: empty route pool");

    std::vector<Mat> t_hat;
    t_hat.reserve(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index k = 0; k < X.rows(); ++k)
        t_hat.push_back(predict_matrix(ols, inst, X.row(k).transpose()));
    const std::vector<Mat> t_act = detail::period_matrices(T, inst);

    std::vector<Eigen::VectorXd> rows;
    std::vector<double> targets;
    for (const Route& r : routes) {
        const std::vector<double> a_free = arrival_times(inst, r, inst.nominal);
        for (Eigen::Index k = 0; k < X.rows(); ++k) {
            const Mat& th = t_hat[static_cast<std::size_t>(k)];
            const Eigen::VectorXd x = X.row(k).transpose();
            const std::vector<double> a_hat = arrival_times(inst, r, th);
            const std::vector<double> a_act =
                arrival_times(inst, r, t_act[static_cast<std::size_t>(k)]);

            std::vector<double> probs(r.seq.size());
            for (std::size_t pos = 0; pos < r.seq.size(); ++pos) {
                const Eigen::VectorXd w = early_covariates(x, inst, r, pos, th, cov);
                probs[pos] = estimate_early_arrival(inst, r, pos, early, w);
            }
            const RiskState risk = propagate_risk(r, inst, cov.sigma, probs);

            for (std::size_t pos = 0; pos < r.seq.size(); ++pos) {
                FpfPoint pt;
                pt.node = r.seq[pos];
                pt.prev = pos == 0 ? 0 : r.seq[pos - 1];
                pt.position = static_cast<int>(pos) + 1;
                pt.a_free = a_free[pos];
                pt.a_hat = a_hat[pos];
                pt.xi = risk.xi[pos];
                rows.push_back(fpf_features(x, inst, pen, th, cov, pt));
                targets.push_back(
                    pen(a_act[pos] - inst.due[static_cast<std::size_t>(r.seq[pos])]));
            }
        }
    }

    // stable zero-target subsample: flag survivors, keep original order
    std::vector<std::size_t> zero_rows;
    std::size_t n_pos = 0;
    for (std::size_t r = 0; r < targets.size(); ++r) {
        if (targets[r] > 0.0)
            ++n_pos;
        else
            zero_rows.push_back(r);
    }
    std::vector<char> keep(targets.size(), 1);
    if (n_pos > 0) {
        const auto cap = static_cast<std::size_t>(max_zero_ratio * static_cast<double>(n_pos));
        if (zero_rows.size() > cap) {
            std::mt19937_64 rng = make_rng(derive_seed(seed, "penalty-subsample"));
            std::shuffle(zero_rows.begin(), zero_rows.end(), rng);
            for (std::size_t z = cap; z < zero_rows.size(); ++z) keep[zero_rows[z]] = 0;
        }
    }

    PenaltyTrainingSet set;
    std::size_t kept = 0;
    for (char k : keep) kept += k;
    set.Y.resize(static_cast<Eigen::Index>(kept), rows.front().size());
    set.pi.resize(static_cast<Eigen::Index>(kept));
    Eigen::Index at = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!keep[r]) continue;
        set.Y.row(at) = rows[r].transpose();
        set.pi(at) = targets[r];
        ++at;
    }
    set.provenance = std::to_string(routes.size()) + " routes x " + std::to_string(X.rows()) +
                     " periods, " + std::to_string(rows.size()) + " raw rows, " +
                     std::to_string(kept) + " kept";
    return set;
}

inline void write_penalty_csv(const PenaltyTrainingSet& set, const std::string& path, int p) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    const std::vector<std::string> names = fpf_names(p);
    if (static_cast<Eigen::Index>(names.size()) != set.Y.cols())
        throw ValidationError("write_penalty_csv: feature dimension mismatch");
    for (const std::string& n : names) out << n << ',';
    out << "target\n";
    for (Eigen::Index r = 0; r < set.Y.rows(); ++r) {
        for (Eigen::Index c = 0; c < set.Y.cols(); ++c)
            out << detail::csv_double(set.Y(r, c)) << ',';
        out << detail::csv_double(set.pi(r)) << '\n';
    }
}

}  // namespace csvrptw
