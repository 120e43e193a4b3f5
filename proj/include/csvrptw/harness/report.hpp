#pragma once

#include <cctype>
#include <cstdio>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "csvrptw/harness/evaluate.hpp"
#include "csvrptw/methods/method.hpp"

namespace csvrptw {

namespace detail {

// "RC101_15" -> family "RC", truncation 15. Untruncated names report 0.
inline std::pair<std::string, int> instance_family(const std::string& name) {
    std::string fam;
    std::size_t i = 0;
    while (i < name.size() && std::isalpha(static_cast<unsigned char>(name[i])))
        fam += name[i++];
    int n = 0;
    const auto us = name.rfind('_');
    if (us != std::string::npos && us + 1 < name.size()) {
        try {
            n = std::stoi(name.substr(us + 1));
        } catch (const std::exception&) {
            n = 0;
        }
    }
    return {fam, n};
}

inline std::string num4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
}

}  // namespace detail

// Result-table aggregation: rows are (model, truncation, instance family)
// groups in first-appearance order, columns are the methods present. Every
// prescriptive column is the mean full-information gap in percent; the
// full-information column is its mean absolute test cost instead, which is
// why it is labeled "(Abs.)".
inline std::string aggregate_report_csv(const std::vector<ResultRow>& rows) {
    if (rows.empty()) throw ValidationError("no result rows to aggregate");

    struct Group {
        std::string model;
        int n = 0;
        std::string family;
        std::set<std::pair<std::string, std::uint64_t>> cells;
        std::vector<double> sum;
        std::vector<int> count;
    };

    std::vector<Method> methods;
    for (Method m : method_roster()) {
        for (const ResultRow& r : rows)
            if (r.method == method_name(m)) {
                methods.push_back(m);
                break;
            }
    }

    std::vector<Group> groups;
    for (const ResultRow& r : rows) {
        const auto [fam, n] = detail::instance_family(r.instance);
        Group* g = nullptr;
        for (Group& cand : groups)
            if (cand.model == r.model && cand.n == n && cand.family == fam) g = &cand;
        if (!g) {
            groups.push_back(Group{r.model, n, fam, {}, {}, {}});
            g = &groups.back();
            g->sum.assign(methods.size(), 0.0);
            g->count.assign(methods.size(), 0);
        }
        g->cells.insert({r.instance, r.seed});
        for (std::size_t k = 0; k < methods.size(); ++k) {
            if (r.method != method_name(methods[k])) continue;
            const double v = methods[k] == Method::full ? r.r_hat : r.rho;
            if (std::isfinite(v)) {
                g->sum[k] += v;
                g->count[k] += 1;
            }
        }
    }

    std::string out = "model,n,family,cells";
    for (Method m : methods) {
        out += ",";
        out += m == Method::full ? "Full (Abs.)" : method_name(m);
    }
    out += "\n";
    for (const Group& g : groups) {
        out += g.model + "," + std::to_string(g.n) + "," + g.family + "," +
               std::to_string(g.cells.size());
        for (std::size_t k = 0; k < methods.size(); ++k) {
            out += ",";
            if (g.count[k] > 0) out += detail::num4(g.sum[k] / g.count[k]);
        }
        out += "\n";
    }
    return out;
}

}  // namespace csvrptw
