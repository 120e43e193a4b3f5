#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "csvrptw/core/error.hpp"

namespace csvrptw {

// Bounded-variable LP in the shape the restricted master needs:
//   minimize cᵀz
//   s.t. equality rows (listed first), then <= rows, 0 <= z_j <= u_j.
// Columns are sparse; slack and artificial variables are internal to the
// solver and never visible to callers.
struct LpProblem {
    struct Col {
        double cost = 0.0;
        double upper = 1.0;  // +inf allowed
        std::vector<std::pair<int, double>> entries;  // (row, coefficient)
    };

    int n_eq = 0;
    int n_le = 0;
    std::vector<double> rhs;  // size n_eq + n_le, equality rows first
    std::vector<Col> cols;

    int n_rows() const { return n_eq + n_le; }
    int n_cols() const { return static_cast<int>(cols.size()); }

    int add_column(double cost, double upper, std::vector<std::pair<int, double>> entries) {
        for (auto& [r, v] : entries) {
            if (r < 0 || r >= n_rows()) throw ValidationError("lp column entry row out of range");
            if (!std::isfinite(v)) throw ValidationError("lp column coefficient not finite");
        }
        if (!std::isfinite(cost) || upper < 0.0) throw ValidationError("lp column cost/bound invalid");
        cols.push_back(Col{cost, upper, std::move(entries)});
        return n_cols() - 1;
    }

    // CPLEX-LP-style text dump, 12 significant digits. Debug aid only.
    std::string dump() const {
        auto num = [](double v) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.12g", v);
            return std::string(buf);
        };
        std::string out = "Minimize\n obj:";
        for (int j = 0; j < n_cols(); ++j)
            out += (cols[j].cost >= 0 ? " + " : " - ") + num(std::abs(cols[j].cost)) + " z" +
                   std::to_string(j);
        out += "\nSubject To\n";
        for (int r = 0; r < n_rows(); ++r) {
            out += " r" + std::to_string(r) + ":";
            for (int j = 0; j < n_cols(); ++j)
                for (auto& [row, v] : cols[j].entries)
                    if (row == r)
                        out += (v >= 0 ? " + " : " - ") + num(std::abs(v)) + " z" + std::to_string(j);
            out += std::string(r < n_eq ? " = " : " <= ") + num(rhs[r]) + "\n";
        }
        out += "Bounds\n";
        for (int j = 0; j < n_cols(); ++j) {
            out += " 0 <= z" + std::to_string(j);
            if (std::isfinite(cols[j].upper)) out += " <= " + num(cols[j].upper);
            out += "\n";
        }
        return out + "End\n";
    }
};

enum class LpStatus { optimal, infeasible, unbounded };

// Basis snapshot for warm starts. Valid for a problem with the same rows
// and at least as many columns (new columns restart nonbasic at 0).
struct LpBasis {
    std::vector<int> basic;           // one variable per row (structural or slack index)
    std::vector<std::uint8_t> stat;   // per structural+slack variable: 0 lower, 1 upper, 2 basic
};

struct LpSolution {
    LpStatus status = LpStatus::optimal;
    double objective = 0.0;
    std::vector<double> z;      // structural variables
    std::vector<double> duals;  // one per row; reduced cost of column j is c_j - duals·A_j
    LpBasis basis;
    int iterations = 0;
};

namespace detail {

// Primal bounded-variable revised simplex with a dense explicit basis
// inverse (master problems here have tens of rows). Two phases; Bland's
// rule engages after 10*(rows+cols) degenerate pivots, which guarantees
// termination.
class Simplex {
  public:
    Simplex(const LpProblem& p, const LpBasis* warm) : p_(p), m_(p.n_rows()) {
        n_struct_ = p.n_cols();
        n_slack_ = p.n_le;
        nv_ = n_struct_ + n_slack_;
        cols_.resize(nv_);
        upper_.resize(nv_);
        cost_.assign(nv_, 0.0);
        for (int j = 0; j < n_struct_; ++j) {
            cols_[j] = p.cols[j].entries;
            upper_[j] = p.cols[j].upper;
            cost_[j] = p.cols[j].cost;
        }
        for (int s = 0; s < n_slack_; ++s) {
            cols_[n_struct_ + s] = {{p.n_eq + s, 1.0}};
            upper_[n_struct_ + s] = kInf;
        }
        if (warm != nullptr && try_warm(*warm)) {
            phase1_ = false;
        } else {
            cold_start();
        }
    }

    LpSolution run() {
        LpSolution sol;
        if (phase1_) {
            solve_phase(true);
            double infeas = 0.0;
            for (int v = nv_; v < nv_ + n_art_; ++v) infeas += value_of(v);
            if (infeas > 1e-7) {
                sol.status = LpStatus::infeasible;
                sol.iterations = iters_;
                return sol;
            }
            // Artificials are pinned to zero for phase 2; basic ones may
            // linger at level 0 in degenerate rows.
            for (int v = nv_; v < nv_ + n_art_; ++v) upper_[v] = 0.0;
            for (int v = 0; v < nv_ + n_art_; ++v) cost_[v] = v < n_struct_ ? p_.cols[v].cost : 0.0;
        }
        const bool bounded = solve_phase(false);
        sol.iterations = iters_;
        if (!bounded) {
            sol.status = LpStatus::unbounded;
            return sol;
        }
        sol.status = LpStatus::optimal;
        sol.z.resize(n_struct_);
        for (int j = 0; j < n_struct_; ++j) sol.z[j] = value_of(j);
        sol.duals = dual_values();
        sol.objective = 0.0;
        for (int j = 0; j < n_struct_; ++j) sol.objective += p_.cols[j].cost * sol.z[j];
        sol.basis.basic = basic_;
        sol.basis.stat.assign(nv_, 0);
        for (int v = 0; v < nv_; ++v) sol.basis.stat[v] = stat_[v];
        for (int r = 0; r < m_; ++r)
            if (sol.basis.basic[r] >= nv_) {
                // A pinned artificial survives only in a degenerate dependent
                // row; such a basis is not portable across problems.
                sol.basis.basic.clear();
                sol.basis.stat.clear();
                break;
            }
        return sol;
    }

  private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();
    static constexpr double kPivTol = 1e-9;
    static constexpr double kDegenTol = 1e-10;
    static constexpr double kDualTol = 1e-9;

    const LpProblem& p_;
    int m_ = 0, n_struct_ = 0, n_slack_ = 0, nv_ = 0, n_art_ = 0;
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<double> upper_, cost_;
    std::vector<std::uint8_t> stat_;  // per variable incl. artificials
    std::vector<int> basic_;          // variable per row
    std::vector<double> xb_;          // basic values, aligned with basic_
    std::vector<double> inv_;         // dense B^{-1}, row-major m x m
    bool phase1_ = true;
    int iters_ = 0;
    int degen_ = 0;

    double& inv(int i, int j) { return inv_[static_cast<std::size_t>(i) * m_ + j]; }

    double value_of(int v) const {
        if (v < static_cast<int>(stat_.size()) && stat_[v] == 2) {
            for (int r = 0; r < m_; ++r)
                if (basic_[r] == v) return xb_[r];
        }
        if (stat_[v] == 1) return upper_[v];
        return 0.0;
    }

    void cold_start() {
        phase1_ = false;
        stat_.assign(nv_, 0);
        basic_.assign(m_, -1);
        // Slacks of <= rows with nonnegative rhs give a free basic start;
        // all other rows receive a signed artificial.
        std::vector<double> diag(m_, 1.0);
        for (int r = 0; r < m_; ++r) {
            if (r >= p_.n_eq && p_.rhs[r] >= 0.0) {
                basic_[r] = n_struct_ + (r - p_.n_eq);
            } else {
                const double sgn = p_.rhs[r] >= 0.0 ? 1.0 : -1.0;
                const int av = nv_ + n_art_;
                cols_.push_back({{r, sgn}});
                upper_.push_back(kInf);
                cost_.push_back(0.0);
                basic_[r] = av;
                diag[r] = sgn;
                ++n_art_;
                phase1_ = true;
            }
        }
        stat_.resize(nv_ + n_art_, 0);
        for (int r = 0; r < m_; ++r) stat_[basic_[r]] = 2;
        inv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int r = 0; r < m_; ++r) inv(r, r) = diag[r];
        if (phase1_)
            for (int v = 0; v < nv_ + n_art_; ++v) cost_[v] = v >= nv_ ? 1.0 : 0.0;
        compute_basic_values();
    }

    bool try_warm(const LpBasis& warm) {
        if (static_cast<int>(warm.basic.size()) != m_) return false;
        if (static_cast<int>(warm.stat.size()) > nv_) return false;
        stat_.assign(nv_, 0);
        for (std::size_t v = 0; v < warm.stat.size(); ++v) stat_[v] = warm.stat[v];
        basic_ = warm.basic;
        std::vector<char> seen(nv_, 0);
        for (int r = 0; r < m_; ++r) {
            const int v = basic_[r];
            if (v < 0 || v >= nv_ || seen[v]) return false;
            seen[v] = 1;
            stat_[v] = 2;
        }
        n_art_ = 0;
        if (!refactor()) return false;
        compute_basic_values();
        // The warm basis must still be primal feasible (it is whenever only
        // columns were added since it was captured).
        for (int r = 0; r < m_; ++r) {
            const int v = basic_[r];
            if (xb_[r] < -1e-7 || xb_[r] > upper_[v] + 1e-7) return false;
        }
        return true;
    }

    bool refactor() {
        // Gauss-Jordan inversion of the basis matrix with partial pivoting.
        std::vector<double> a(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int r = 0; r < m_; ++r)
            for (auto& [row, v] : cols_[basic_[r]]) a[static_cast<std::size_t>(row) * m_ + r] = v;
        std::vector<double> e(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i) e[static_cast<std::size_t>(i) * m_ + i] = 1.0;
        for (int c = 0; c < m_; ++c) {
            int piv = -1;
            double best = 1e-11;
            for (int r = c; r < m_; ++r) {
                const double v = std::abs(a[static_cast<std::size_t>(r) * m_ + c]);
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (piv < 0) return false;
            if (piv != c)
                for (int k = 0; k < m_; ++k) {
                    std::swap(a[static_cast<std::size_t>(piv) * m_ + k],
                              a[static_cast<std::size_t>(c) * m_ + k]);
                    std::swap(e[static_cast<std::size_t>(piv) * m_ + k],
                              e[static_cast<std::size_t>(c) * m_ + k]);
                }
            const double d = a[static_cast<std::size_t>(c) * m_ + c];
            for (int k = 0; k < m_; ++k) {
                a[static_cast<std::size_t>(c) * m_ + k] /= d;
                e[static_cast<std::size_t>(c) * m_ + k] /= d;
            }
            for (int r = 0; r < m_; ++r) {
                if (r == c) continue;
                const double f = a[static_cast<std::size_t>(r) * m_ + c];
                if (f == 0.0) continue;
                for (int k = 0; k < m_; ++k) {
                    a[static_cast<std::size_t>(r) * m_ + k] -=
                        f * a[static_cast<std::size_t>(c) * m_ + k];
                    e[static_cast<std::size_t>(r) * m_ + k] -=
                        f * e[static_cast<std::size_t>(c) * m_ + k];
                }
            }
        }
        inv_ = std::move(e);
        return true;
    }

    void compute_basic_values() {
        // x_B = B^{-1} (b - sum of at-upper columns at their bound)
        std::vector<double> r(m_);
        for (int i = 0; i < m_; ++i) r[i] = p_.rhs[i];
        for (int v = 0; v < static_cast<int>(stat_.size()); ++v)
            if (stat_[v] == 1)
                for (auto& [row, coef] : cols_[v]) r[row] -= coef * upper_[v];
        xb_.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            double s = 0.0;
            for (int k = 0; k < m_; ++k) s += inv(i, k) * r[k];
            xb_[i] = s;
        }
    }

    std::vector<double> dual_values() const {
        std::vector<double> y(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            double s = 0.0;
            for (int r = 0; r < m_; ++r) s += cost_[basic_[r]] * inv_[static_cast<std::size_t>(r) * m_ + i];
            y[i] = s;
        }
        return y;
    }

    double reduced_cost(const std::vector<double>& y, int v) const {
        double d = cost_[v];
        for (auto& [row, coef] : cols_[v]) d -= y[row] * coef;
        return d;
    }

    // Returns false only on phase-2 unboundedness.
    bool solve_phase(bool phase1) {
        const int total = static_cast<int>(stat_.size());
        const int bland_after = 10 * (m_ + total);
        const long max_iters = 20000L + 500L * (m_ + total);
        long local = 0;
        while (true) {
            if (++local > max_iters)
                throw NumericError("simplex iteration cap exceeded (" + std::to_string(max_iters) + ")");
            ++iters_;
            const bool bland = degen_ > bland_after;
            const std::vector<double> y = dual_values();

            int q = -1;
            double best = 0.0;
            int dir = 0;  // +1 entering rises from lower, -1 drops from upper
            for (int v = 0; v < total; ++v) {
                if (stat_[v] == 2) continue;
                if (upper_[v] <= 0.0) continue;  // pinned
                const double d = reduced_cost(y, v);
                if (stat_[v] == 0 && d < -kDualTol) {
                    if (bland) {
                        q = v;
                        dir = 1;
                        break;
                    }
                    if (-d > best) {
                        best = -d;
                        q = v;
                        dir = 1;
                    }
                } else if (stat_[v] == 1 && d > kDualTol) {
                    if (bland) {
                        q = v;
                        dir = -1;
                        break;
                    }
                    if (d > best) {
                        best = d;
                        q = v;
                        dir = -1;
                    }
                }
            }
            if (q < 0) return true;  // phase optimal

            // Direction through the basis.
            std::vector<double> w(m_, 0.0);
            for (auto& [row, coef] : cols_[q])
                for (int i = 0; i < m_; ++i)
                    if (inv_[static_cast<std::size_t>(i) * m_ + row] != 0.0)
                        w[i] += inv_[static_cast<std::size_t>(i) * m_ + row] * coef;

            double tmax = std::isfinite(upper_[q]) ? upper_[q] : kInf;  // bound flip distance
            int leave = -1;
            bool leave_to_upper = false;
            for (int i = 0; i < m_; ++i) {
                const double g = dir * w[i];  // basic i moves at rate -g
                const int bv = basic_[i];
                double t;
                bool to_upper;
                if (g > kPivTol) {  // decreases toward lower bound 0
                    t = std::max(0.0, xb_[i] / g);
                    to_upper = false;
                } else if (g < -kPivTol && std::isfinite(upper_[bv])) {
                    t = std::max(0.0, (upper_[bv] - xb_[i]) / (-g));
                    to_upper = true;
                } else {
                    continue;
                }
                if (t < tmax - 1e-12) {
                    tmax = t;
                    leave = i;
                    leave_to_upper = to_upper;
                } else if (leave >= 0 && t <= tmax + 1e-12) {
                    // tie-break: Bland -> smallest leaving variable index,
                    // otherwise largest pivot magnitude for stability
                    const bool take =
                        bland ? bv < basic_[leave] : std::abs(w[i]) > std::abs(w[leave]);
                    if (take) {
                        leave = i;
                        leave_to_upper = to_upper;
                    }
                }
            }

            if (!std::isfinite(tmax)) {
                if (phase1) throw NumericError("phase-1 objective unbounded (internal bug)");
                return false;  // unbounded
            }
            if (tmax < kDegenTol) ++degen_; else degen_ = 0;

            if (leave < 0) {
                // Entering variable runs to its opposite bound, basis unchanged.
                stat_[q] = dir > 0 ? 1 : 0;
                for (int i = 0; i < m_; ++i) xb_[i] -= dir * tmax * w[i];
                continue;
            }

            // Pivot: q enters (basic), basic_[leave] exits to one of its bounds.
            const int out = basic_[leave];
            for (int i = 0; i < m_; ++i) xb_[i] -= dir * tmax * w[i];
            const double enter_val = (dir > 0 ? 0.0 : upper_[q]) + dir * tmax;
            stat_[out] = leave_to_upper ? 1 : 0;
            stat_[q] = 2;
            basic_[leave] = q;
            xb_[leave] = enter_val;

            const double piv = w[leave];
            for (int k = 0; k < m_; ++k) inv(leave, k) /= piv;
            for (int i = 0; i < m_; ++i) {
                if (i == leave) continue;
                const double f = w[i];
                if (f == 0.0) continue;
                for (int k = 0; k < m_; ++k) inv(i, k) -= f * inv(leave, k);
            }

            if (iters_ % 100 == 0) {
                if (!refactor()) throw NumericError("singular basis during refactorization");
                compute_basic_values();
            }
        }
    }
};

}  // namespace detail

inline LpSolution solve_lp(const LpProblem& prob, const LpBasis* warm = nullptr) {
    if (prob.n_eq < 0 || prob.n_le < 0) throw ValidationError("lp row counts must be nonnegative");
    if (static_cast<int>(prob.rhs.size()) != prob.n_rows())
        throw ValidationError("lp rhs size does not match row count");
    for (double b : prob.rhs)
        if (!std::isfinite(b)) throw ValidationError("lp rhs not finite");
    detail::Simplex s(prob, warm);
    return s.run();
}

// Worst violation of primal feasibility / dual sign conditions /
// complementary slackness; test support.
inline double lp_check_optimality(const LpProblem& p, const LpSolution& s) {
    if (s.status != LpStatus::optimal) throw ValidationError("solution not optimal");
    double worst = 0.0;
    std::vector<double> act(p.n_rows(), 0.0);
    for (int j = 0; j < p.n_cols(); ++j) {
        worst = std::max(worst, -s.z[j]);
        worst = std::max(worst, s.z[j] - p.cols[j].upper);
        for (auto& [r, v] : p.cols[j].entries) act[r] += v * s.z[j];
    }
    for (int r = 0; r < p.n_rows(); ++r) {
        if (r < p.n_eq)
            worst = std::max(worst, std::abs(act[r] - p.rhs[r]));
        else {
            worst = std::max(worst, act[r] - p.rhs[r]);
            // complementary slackness: inactive <= row must carry a zero dual
            if (p.rhs[r] - act[r] > 1e-7) worst = std::max(worst, std::abs(s.duals[r]));
        }
    }
    for (int j = 0; j < p.n_cols(); ++j) {
        double d = p.cols[j].cost;
        for (auto& [r, v] : p.cols[j].entries) d -= s.duals[r] * v;
        if (s.z[j] > 1e-7 && s.z[j] < p.cols[j].upper - 1e-7) worst = std::max(worst, std::abs(d));
        if (s.z[j] <= 1e-7) worst = std::max(worst, -d);                     // at lower: d >= 0
        if (s.z[j] >= p.cols[j].upper - 1e-7) worst = std::max(worst, d);    // at upper: d <= 0
    }
    return worst;
}

}  // namespace csvrptw
