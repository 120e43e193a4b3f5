#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "csvrptw/core/route.hpp"
#include "csvrptw/solver/objective.hpp"

namespace csvrptw {

struct PoolColumn {
    Route route;
    double cost = 0.0;    // first-stage travel
    double second = 0.0;  // cached second-stage term under the solve objective
    int load = 0;
    std::uint64_t mask = 0;  // customers visited, bit j for customer j
};

// The restricted route set, shared by every tree node of one solve. Columns
// are append-only and deduplicated by visit sequence; a node filters rather
// than deletes. Access is single-threaded per solve (the experiment harness
// gives each worker its own pool), so reads need no locking.
class ColumnPool {
  public:
    // Returns the new column's index, or nothing when the route is known.
    std::optional<std::size_t> add(const Instance& inst, const SolveObjective& obj, Route r) {
        std::string key(r.seq.size(), '\0');
        for (std::size_t k = 0; k < r.seq.size(); ++k) key[k] = static_cast<char>(r.seq[k]);
        if (!index_.emplace(std::move(key), cols_.size()).second) return std::nullopt;

        PoolColumn col;
        col.cost = route_cost(inst, r);
        col.second = obj.second_stage(inst, r);
        col.load = route_load(inst, r);
        for (int v : r.seq) col.mask |= std::uint64_t{1} << static_cast<unsigned>(v);
        col.route = std::move(r);
        cols_.push_back(std::move(col));
        return cols_.size() - 1;
    }

    const std::vector<PoolColumn>& columns() const { return cols_; }
    const PoolColumn& at(std::size_t i) const { return cols_[i]; }
    std::size_t size() const { return cols_.size(); }

    std::optional<std::size_t> find(const Route& r) const {
        std::string key(r.seq.size(), '\0');
        for (std::size_t k = 0; k < r.seq.size(); ++k) key[k] = static_cast<char>(r.seq[k]);
        const auto it = index_.find(key);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

  private:
    std::vector<PoolColumn> cols_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Cheapest-insertion heuristic over at most K routes: repeatedly place the
// unrouted customer with the smallest first-stage insertion cost anywhere
// capacity allows. Customers that fit nowhere get singleton overflow routes
// (useful columns even when the full set exceeds the fleet).
inline std::vector<Route> greedy_insertion_routes(const Instance& inst) {
    const int k_max = inst.n_vehicles;
    std::vector<std::vector<int>> seqs(static_cast<std::size_t>(k_max));
    std::vector<int> loads(static_cast<std::size_t>(k_max), 0);
    std::vector<char> routed(static_cast<std::size_t>(inst.n_nodes()), 0);

    auto insertion_cost = [&](const std::vector<int>& s, std::size_t pos, int j) {
        const int a = pos == 0 ? 0 : s[pos - 1];
        const int b = pos == s.size() ? 0 : s[pos];
        return inst.cost(static_cast<std::size_t>(a), static_cast<std::size_t>(j)) +
               inst.cost(static_cast<std::size_t>(j), static_cast<std::size_t>(b)) -
               inst.cost(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    };

    for (int placed = 0; placed < inst.n_customers; ++placed) {
        double best = std::numeric_limits<double>::infinity();
        int bj = -1, br = -1;
        std::size_t bpos = 0;
        for (int j = 1; j <= inst.n_customers; ++j) {
            if (routed[static_cast<std::size_t>(j)]) continue;
            const int qj = inst.demand[static_cast<std::size_t>(j)];
            for (int r = 0; r < k_max; ++r) {
                if (loads[static_cast<std::size_t>(r)] + qj > inst.capacity) continue;
                const auto& s = seqs[static_cast<std::size_t>(r)];
                for (std::size_t pos = 0; pos <= s.size(); ++pos) {
                    const double d = insertion_cost(s, pos, j);
                    if (d < best - 1e-12) {
                        best = d;
                        bj = j;
                        br = r;
                        bpos = pos;
                    }
                }
            }
        }
        if (bj < 0) break;  // nothing fits anywhere
        auto& s = seqs[static_cast<std::size_t>(br)];
        s.insert(s.begin() + static_cast<std::ptrdiff_t>(bpos), bj);
        loads[static_cast<std::size_t>(br)] += inst.demand[static_cast<std::size_t>(bj)];
        routed[static_cast<std::size_t>(bj)] = 1;
    }

    std::vector<Route> out;
    for (auto& s : seqs)
        if (!s.empty()) out.push_back(Route{std::move(s)});
    for (int j = 1; j <= inst.n_customers; ++j)
        if (!routed[static_cast<std::size_t>(j)]) out.push_back(Route{{j}});
    return out;
}

// Singletons guarantee master feasibility whenever K >= N; the greedy
// routes give the first incumbent a chance at the root.
inline void seed_pool(ColumnPool& pool, const Instance& inst, const SolveObjective& obj) {
    for (int j = 1; j <= inst.n_customers; ++j) pool.add(inst, obj, Route{{j}});
    for (Route& r : greedy_insertion_routes(inst)) pool.add(inst, obj, std::move(r));
}

}  // namespace csvrptw
