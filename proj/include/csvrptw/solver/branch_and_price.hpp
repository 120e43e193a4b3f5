#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "csvrptw/solver/column_generation.hpp"

namespace csvrptw {

// One subproblem of the arc dichotomy. Forcing (i,j) is stored as-is and
// expanded into forbidden alternatives when the node's ArcRules are built,
// so the two sets stay trivially disjoint.
struct BranchNode {
    std::vector<std::pair<int, int>> forced;
    std::vector<std::pair<int, int>> forbidden;
    double bound = -std::numeric_limits<double>::infinity();
    int depth = 0;
    std::size_t id = 0;
};

struct SolveLimits {
    double time_limit = 0.0;     // wall seconds, 0 = unlimited
    std::size_t node_limit = 0;  // processed nodes, 0 = unlimited
    PricingOptions pricing;      // max_routes 0 means the CG default batch
    std::ostream* trace = nullptr;  // optional per-node CSV log
    std::vector<Route>* route_pool = nullptr;  // receives every column of the solve
};

enum class SolveStatus { optimal, limit, infeasible };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::limit: return "limit";
        default: return "infeasible";
    }
}

struct SolveReport {
    SolveStatus status = SolveStatus::optimal;
    Solution incumbent;  // empty unless an integer solution was found
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
    double root_lp = -std::numeric_limits<double>::infinity();
    double gap = std::numeric_limits<double>::infinity();
    std::size_t nodes = 0;
    PricingStats pricing;
    double wall_seconds = 0.0;

    std::string to_json() const {
        const auto num = [](double v) {
            if (!std::isfinite(v)) return std::string("null");
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            return std::string(buf);
        };
        std::string s = "{\"status\":\"";
        s += to_string(status);
        s += "\",\"upper\":" + num(upper) + ",\"lower\":" + num(lower);
        s += ",\"gap\":" + num(gap) + ",\"root_lp\":" + num(root_lp);
        s += ",\"nodes\":" + std::to_string(nodes);
        s += ",\"wall_seconds\":" + num(wall_seconds);
        s += ",\"pricing\":{\"created\":" + std::to_string(pricing.created) +
             ",\"emitted\":" + std::to_string(pricing.emitted) +
             ",\"exhausted\":" + (pricing.exhausted ? std::string("true") : std::string("false")) +
             "}";
        s += ",\"routes\":[";
        for (std::size_t r = 0; r < incumbent.routes.size(); ++r) {
            if (r) s += ",";
            s += "[";
            for (std::size_t k = 0; k < incumbent.routes[r].seq.size(); ++k) {
                if (k) s += ",";
                s += std::to_string(incumbent.routes[r].seq[k]);
            }
            s += "]";
        }
        return s + "]}";
    }
};

namespace detail {

inline ArcRules node_rules(const Instance& inst, const BranchNode& nd) {
    ArcRules rules(inst);
    const auto n = static_cast<std::size_t>(inst.n_nodes());
    for (auto [a, b] : nd.forbidden)
        rules.forbid(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    for (auto [i, j] : nd.forced) {
        // forcing an arc bans every alternative around its endpoints; the
        // depot keeps its other legs (many routes start and end there)
        if (i != 0)
            for (std::size_t k = 0; k < n; ++k)
                if (static_cast<int>(k) != i && static_cast<int>(k) != j)
                    rules.forbid(static_cast<std::size_t>(i), k);
        if (j != 0)
            for (std::size_t k = 0; k < n; ++k)
                if (static_cast<int>(k) != i && static_cast<int>(k) != j)
                    rules.forbid(k, static_cast<std::size_t>(j));
    }
    return rules;
}

inline Mat pool_arc_flows(const Instance& inst, const CgOutcome& cg, const ColumnPool& pool) {
    const auto n = static_cast<std::size_t>(inst.n_nodes());
    Mat f(n, n);
    for (std::size_t c = 0; c < cg.layout.pool_of_col.size(); ++c) {
        const double z = cg.lp.z[c + static_cast<std::size_t>(cg.layout.n_bigm)];
        if (z <= 1e-12) continue;
        int prev = 0;
        for (int v : pool.at(cg.layout.pool_of_col[c]).route.seq) {
            f(static_cast<std::size_t>(prev), static_cast<std::size_t>(v)) += z;
            prev = v;
        }
        f(static_cast<std::size_t>(prev), 0) += z;
    }
    return f;
}

// Arc with flow nearest 0.5; ties prefer the longer arc, then smaller
// (i,j). A fractional master over distinct elementary routes always has
// one (integral flows force unique successors, hence integral z).
inline std::pair<int, int> pick_branch_arc(const Instance& inst, const Mat& flows) {
    int bi = -1, bj = -1;
    double bdist = 2.0, bcost = -1.0;
    const int n = inst.n_nodes();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double f = flows(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            const double d = std::abs(f - 0.5);
            const double c = inst.cost(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            const bool better = [&] {
                if (bi < 0) return true;
                if (d < bdist - 1e-12) return true;
                if (d > bdist + 1e-12) return false;
                if (c > bcost + 1e-12) return true;
                if (c < bcost - 1e-12) return false;
                return std::make_pair(i, j) < std::make_pair(bi, bj);
            }();
            if (better) {
                bdist = d;
                bcost = c;
                bi = i;
                bj = j;
            }
        }
    if (bi < 0 || bdist >= 0.5 - 1e-9)
        throw NumericError("fractional master but no fractional arc flow");
    return {bi, bj};
}

}  // namespace detail

// Best-bound tree search over arc dichotomies. Nodes run column generation
// to optimality, integral masters update the incumbent, fractional ones
// split on the arc whose flow is nearest 0.5. Limits turn into a reported
// gap, never an exception; only a root label-cap abort escalates.
inline SolveReport branch_and_price(const Instance& inst, const SolveObjective& obj,
                                    const SolveLimits& limits = {}) {
    inst.validate();
    obj.validate(inst);
    const auto t0 = std::chrono::steady_clock::now();
    const auto deadline =
        limits.time_limit > 0.0
            ? std::optional<std::chrono::steady_clock::time_point>(
                  t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(limits.time_limit)))
            : std::nullopt;
    const double inf = std::numeric_limits<double>::infinity();

    ColumnPool pool;
    seed_pool(pool, inst, obj);
    const auto export_pool = [&] {
        if (!limits.route_pool) return;
        limits.route_pool->clear();
        limits.route_pool->reserve(pool.size());
        for (std::size_t c = 0; c < pool.size(); ++c)
            limits.route_pool->push_back(pool.at(c).route);
    };

    SolveReport rep;
    if (limits.trace) *limits.trace << "node,depth,bound,lp,action,upper,open\n";

    std::vector<BranchNode> store;
    store.push_back(BranchNode{});
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
    open.emplace(-inf, 0);
    std::size_t next_id = 1;

    bool have_inc = false;
    bool lb_compromised = false;
    double lower_at_stop = -inf;
    bool stopped = false;

    const auto trace_row = [&](const BranchNode& nd, double lp, const char* action) {
        if (!limits.trace) return;
        *limits.trace << nd.id << ',' << nd.depth << ',' << nd.bound << ',' << lp << ','
                      << action << ',' << rep.upper << ',' << open.size() << '\n';
    };

    const auto push_children = [&](const BranchNode& nd, std::pair<int, int> arc, double bound) {
        BranchNode off = nd;
        off.forbidden.push_back(arc);
        off.bound = bound;
        off.depth = nd.depth + 1;
        off.id = next_id++;
        BranchNode on = nd;
        on.forced.push_back(arc);
        on.bound = bound;
        on.depth = nd.depth + 1;
        on.id = next_id++;
        open.emplace(off.bound, store.size());
        store.push_back(std::move(off));
        open.emplace(on.bound, store.size());
        store.push_back(std::move(on));
    };

    while (!open.empty()) {
        const std::size_t slot = open.top().second;
        open.pop();
        const BranchNode node = store[slot];

        if (have_inc && node.bound >= rep.upper - 1e-9) {
            trace_row(node, node.bound, "pruned");
            continue;
        }
        if (have_inc && !lb_compromised && std::isfinite(node.bound) &&
            (rep.upper - node.bound) / std::max(rep.upper, 1e-12) <= 1e-6) {
            lower_at_stop = node.bound;
            stopped = true;
            rep.status = SolveStatus::optimal;
            break;
        }
        if ((limits.node_limit > 0 && rep.nodes >= limits.node_limit) ||
            (deadline && std::chrono::steady_clock::now() > *deadline)) {
            lower_at_stop = node.bound;
            stopped = true;
            rep.status = SolveStatus::limit;
            break;
        }

        const ArcRules rules = detail::node_rules(inst, node);
        CgOutcome cg;
        try {
            cg = column_generation(inst, obj, pool, rules, node.id == 0, limits.pricing,
                                   deadline ? &*deadline : nullptr);
        } catch (const InfeasibleError&) {
            // only the root throws; an infeasible root settles the instance
            rep.status = SolveStatus::infeasible;
            rep.nodes = 1;
            rep.upper = inf;
            rep.lower = inf;
            rep.gap = 0.0;
            rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                   .count();
            export_pool();
            return rep;
        }
        ++rep.nodes;
        rep.pricing.created += cg.pricing.created;
        rep.pricing.pruned_rcsp += cg.pricing.pruned_rcsp;
        rep.pricing.pruned_knapsack += cg.pricing.pruned_knapsack;
        rep.pricing.rejected_capacity += cg.pricing.rejected_capacity;
        rep.pricing.emitted += cg.pricing.emitted;
        rep.pricing.exhausted = rep.pricing.exhausted || cg.pricing.exhausted;

        if (cg.infeasible) {
            trace_row(node, cg.value, "infeasible");
            continue;
        }
        if (node.id == 0 && cg.bound_valid) rep.root_lp = cg.value;
        const double nb = cg.bound_valid ? cg.value : -inf;
        if (cg.bound_valid && have_inc && nb >= rep.upper - 1e-9) {
            trace_row(node, cg.value, "pruned");
            continue;
        }

        bool integral = true;
        const auto nb_cols = static_cast<std::size_t>(cg.layout.n_bigm);
        for (std::size_t c = 0; c < cg.layout.pool_of_col.size() && integral; ++c) {
            const double z = cg.lp.z[c + nb_cols];
            if (std::abs(z - std::round(z)) > 1e-7) integral = false;
        }

        if (integral) {
            Solution sol;
            for (std::size_t c = 0; c < cg.layout.pool_of_col.size(); ++c)
                if (cg.lp.z[c + nb_cols] > 0.5)
                    sol.routes.push_back(pool.at(cg.layout.pool_of_col[c]).route);
            sol.validate(inst);
            const double total = obj.solution_total(inst, sol);
            if (std::abs(total - cg.value) > 1e-6)
                throw NumericError("integral master drifts from recomputed objective by " +
                                   std::to_string(total - cg.value));
            if (!have_inc || total < rep.upper - 1e-9) {
                rep.upper = total;
                rep.incumbent = sol;
                have_inc = true;
            }
            if (cg.bound_valid) {
                trace_row(node, cg.value, "integral");
                continue;  // LP optimum integral: node solved exactly
            }
            // unconverged pricing under an integral master: split on an
            // undecided arc of the cover so optimality stays provable
            std::optional<std::pair<int, int>> undecided;
            for (const Route& r : sol.routes) {
                int prev = 0;
                for (std::size_t k = 0; k <= r.seq.size() && !undecided; ++k) {
                    const int to = k < r.seq.size() ? r.seq[k] : 0;
                    const std::pair<int, int> arc{prev, to};
                    bool forced = false;
                    for (auto& fa : node.forced) forced = forced || fa == arc;
                    if (!forced) undecided = arc;
                    prev = to;
                }
                if (undecided) break;
            }
            if (!undecided) {
                lb_compromised = true;
                trace_row(node, cg.value, "exhausted-leaf");
                continue;
            }
            push_children(node, *undecided, -inf);
            trace_row(node, cg.value, "branch-exhausted");
            continue;
        }

        const Mat flows = detail::pool_arc_flows(inst, cg, pool);
        const auto arc = detail::pick_branch_arc(inst, flows);
        push_children(node, arc, nb);
        trace_row(node, cg.value, "branch");
    }

    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    export_pool();
    if (stopped) {
        rep.lower = lb_compromised ? -inf : lower_at_stop;
    } else {
        // tree exhausted
        if (!have_inc) {
            rep.status = lb_compromised ? SolveStatus::limit : SolveStatus::infeasible;
            if (rep.status == SolveStatus::infeasible) {
                rep.upper = inf;
                rep.lower = inf;
                rep.gap = 0.0;
                return rep;
            }
        } else {
            rep.status = lb_compromised ? SolveStatus::limit : SolveStatus::optimal;
        }
        rep.lower = lb_compromised ? -inf : rep.upper;
    }
    if (std::isfinite(rep.upper) && rep.upper > 0.0 && std::isfinite(rep.lower))
        rep.gap = std::max(0.0, (rep.upper - rep.lower) / rep.upper);
    else if (std::isfinite(rep.upper) && std::isfinite(rep.lower) && rep.upper == rep.lower)
        rep.gap = 0.0;
    return rep;
}

}  // namespace csvrptw
