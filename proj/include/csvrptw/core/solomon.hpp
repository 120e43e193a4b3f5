#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "csvrptw/core/instance.hpp"

namespace csvrptw {

// Raw content of a Solomon-format benchmark file.
struct SolomonData {
    std::string name;
    int n_vehicles = 0;
    int capacity = 0;
    struct Row {
        int id = 0;
        double x = 0, y = 0;
        int demand = 0;
        double ready = 0, due = 0, service = 0;
    };
    std::vector<Row> rows;  // rows[0] is the depot (id 0)
};

namespace detail {

inline bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

inline bool has_alpha(const std::string& s) {
    return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isalpha(c); });
}

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

// Parses the classic Solomon layout: instance name, a VEHICLE block with
// NUMBER/CAPACITY, then a CUSTOMER table with 7 numeric columns. Errors
// carry 1-based line numbers.
inline SolomonData parse_solomon(const std::string& text) {
    std::vector<std::string> lines;
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
    }
    auto fail = [](std::size_t lineno, const std::string& msg) -> void {
        throw ParseError("solomon line " + std::to_string(lineno + 1) + ": " + msg);
    };

    SolomonData data;
    std::size_t i = 0;
    while (i < lines.size() && detail::is_blank(lines[i])) ++i;
    if (i == lines.size()) throw ParseError("solomon: empty file");
    data.name = detail::trim(lines[i++]);

    // VEHICLE block: keyword, header, then "K Q".
    while (i < lines.size() && detail::trim(lines[i]) != "VEHICLE") ++i;
    if (i == lines.size()) throw ParseError("solomon: missing VEHICLE section");
    ++i;
    while (i < lines.size() && (detail::is_blank(lines[i]) || detail::has_alpha(lines[i]))) ++i;
    if (i == lines.size()) fail(lines.size() - 1, "missing vehicle NUMBER/CAPACITY values");
    {
        std::istringstream in(lines[i]);
        if (!(in >> data.n_vehicles >> data.capacity))
            fail(i, "cannot read vehicle number and capacity");
        if (data.n_vehicles < 1 || data.capacity < 1)
            fail(i, "vehicle number and capacity must be positive");
        ++i;
    }

    while (i < lines.size() && detail::trim(lines[i]) != "CUSTOMER") ++i;
    if (i == lines.size()) throw ParseError("solomon: missing CUSTOMER section");
    ++i;
    for (; i < lines.size(); ++i) {
        if (detail::is_blank(lines[i]) || detail::has_alpha(lines[i])) continue;
        SolomonData::Row r;
        std::istringstream in(lines[i]);
        if (!(in >> r.id >> r.x >> r.y >> r.demand >> r.ready >> r.due >> r.service))
            fail(i, "customer row needs 7 numeric fields");
        double extra;
        if (in >> extra) fail(i, "customer row has more than 7 fields");
        data.rows.push_back(r);
    }
    if (data.rows.empty()) throw ParseError("solomon: no customer rows");
    if (data.rows.front().id != 0) throw ParseError("solomon: first customer row must be the depot (id 0)");
    for (std::size_t k = 0; k < data.rows.size(); ++k)
        for (std::size_t m = k + 1; m < data.rows.size(); ++m)
            if (data.rows[k].id == data.rows[m].id)
                throw ParseError("solomon: duplicate customer id " + std::to_string(data.rows[k].id));
    return data;
}

inline SolomonData parse_solomon_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_solomon(ss.str());
}

inline std::string serialize_solomon(const SolomonData& data) {
    std::ostringstream out;
    out << data.name << "\n\nVEHICLE\nNUMBER     CAPACITY\n";
    out << "  " << data.n_vehicles << "        " << data.capacity << "\n\n";
    out << "CUSTOMER\n"
        << "CUST NO.  XCOORD.   YCOORD.   DEMAND    READY TIME  DUE DATE   SERVICE TIME\n\n";
    for (const auto& r : data.rows) {
        out << "  " << r.id << "  " << r.x << "  " << r.y << "  " << r.demand << "  " << r.ready
            << "  " << r.due << "  " << r.service << "\n";
    }
    return out.str();
}

// Builds the working instance from the first n_customers rows after the
// depot. Fleet size and capacity always come from the file header, also
// for truncations. Costs are unrounded Euclidean distances; service times
// are folded into outgoing nominal travel times.
inline Instance make_instance(const SolomonData& data, int n_customers = -1) {
    const int avail = static_cast<int>(data.rows.size()) - 1;
    if (n_customers < 0) n_customers = avail;
    if (n_customers < 1 || n_customers > avail)
        throw ValidationError(data.name + ": cannot truncate to " + std::to_string(n_customers) +
                              " customers, file has " + std::to_string(avail));

    Instance inst;
    inst.name = n_customers == avail ? data.name : data.name + "_" + std::to_string(n_customers);
    inst.n_customers = n_customers;
    inst.n_vehicles = data.n_vehicles;
    inst.capacity = data.capacity;
    const std::size_t n = static_cast<std::size_t>(n_customers) + 1;
    inst.x.resize(n);
    inst.y.resize(n);
    inst.demand.resize(n);
    inst.ready.resize(n);
    inst.due.resize(n);
    inst.service.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& r = data.rows[k];
        inst.x[k] = r.x;
        inst.y[k] = r.y;
        inst.demand[k] = r.demand;
        inst.ready[k] = r.ready;
        inst.due[k] = r.due;
        inst.service[k] = r.service;
    }
    inst.cost = euclidean_costs(inst.x, inst.y);
    inst.nominal = fold_service(inst.cost, inst.service);
    inst.validate();
    return inst;
}

}  // namespace csvrptw
