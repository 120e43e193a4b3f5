#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "csvrptw/lp/simplex.hpp"
#include "csvrptw/pricing/duals.hpp"
#include "csvrptw/solver/pool.hpp"

namespace csvrptw {

// Restricted master over a filtered pool slice:
//   rows 0..N-1   sum_{theta ni i} z_theta = 1        (partitioning)
//   row  N        sum_theta z_theta        <= K       (fleet)
// Structural column order is the big-M block (one per partitioning row,
// indices 0..N-1) followed by pool columns in pool order. Keeping the
// big-M block first means appended pool columns never shift an existing
// index, which is what makes warm bases portable across CG iterations.
struct RmpLayout {
    LpProblem lp;
    std::vector<std::size_t> pool_of_col;  // structural index - n_bigm -> pool index
    int n_bigm = 0;
    double big_m = 0.0;
};

inline double big_m_cost(const Instance& inst, const ColumnPool& pool) {
    double singleton = 0.0;
    for (const PoolColumn& c : pool.columns())
        if (c.route.seq.size() == 1) singleton = std::max(singleton, c.cost + c.second);
    return std::max(1e7, 1e3 * singleton);
}

inline bool route_respects(const Route& r, const ArcRules& rules) {
    int prev = 0;
    for (int v : r.seq) {
        if (!rules.allowed(static_cast<std::size_t>(prev), static_cast<std::size_t>(v)))
            return false;
        prev = v;
    }
    return rules.allowed(static_cast<std::size_t>(prev), 0);
}

inline RmpLayout build_rmp(const Instance& inst, const ColumnPool& pool,
                           const std::vector<std::size_t>& active) {
    const int n = inst.n_customers;
    RmpLayout m;
    m.n_bigm = n;
    m.big_m = big_m_cost(inst, pool);
    m.lp.n_eq = n;
    m.lp.n_le = 1;
    m.lp.rhs.assign(static_cast<std::size_t>(n + 1), 1.0);
    m.lp.rhs.back() = static_cast<double>(inst.n_vehicles);

    for (int i = 0; i < n; ++i) m.lp.add_column(m.big_m, 1.0, {{i, 1.0}});
    for (std::size_t idx : active) {
        const PoolColumn& c = pool.at(idx);
        std::vector<std::pair<int, double>> entries;
        entries.reserve(c.route.seq.size() + 1);
        for (int v : c.route.seq) entries.push_back({v - 1, 1.0});
        entries.push_back({n, 1.0});
        m.lp.add_column(c.cost + c.second, 1.0, std::move(entries));
        m.pool_of_col.push_back(idx);
    }
    return m;
}

// Re-targets a basis snapshot after `added` structural columns were
// appended: slack indices move up by `added`, new columns start nonbasic
// at their lower bound.
inline LpBasis shift_basis(const LpBasis& b, int old_n_struct, int added) {
    if (added == 0 || b.basic.empty()) return b;
    LpBasis out;
    out.basic = b.basic;
    for (int& v : out.basic)
        if (v >= old_n_struct) v += added;
    out.stat.assign(b.stat.size() + static_cast<std::size_t>(added), 0);
    for (std::size_t v = 0; v < b.stat.size(); ++v) {
        const std::size_t dst =
            v < static_cast<std::size_t>(old_n_struct) ? v : v + static_cast<std::size_t>(added);
        out.stat[dst] = b.stat[v];
    }
    return out;
}

inline Duals duals_from_lp(const Instance& inst, const LpSolution& lp) {
    Duals d = Duals::zero(inst);
    for (int i = 0; i < inst.n_customers; ++i)
        d.gamma[static_cast<std::size_t>(i + 1)] = lp.duals[static_cast<std::size_t>(i)];
    d.mu = lp.duals[static_cast<std::size_t>(inst.n_customers)];
    return d;
}

}  // namespace csvrptw
