#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "csvrptw/core/instance.hpp"
#include "csvrptw/core/route.hpp"

namespace csvrptw {

using json = nlohmann::json;

// Matrices serialize row-major with explicit shape so readers never have to
// guess the arc order.
inline json mat_to_json(const Mat& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

inline Mat mat_from_json(const json& j) {
    Mat m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != m.rows() * m.cols())
        throw ParseError("matrix payload size does not match shape");
    m.data() = std::move(data);
    return m;
}

inline json instance_to_json(const Instance& inst) {
    return json{{"name", inst.name},
                {"n_customers", inst.n_customers},
                {"n_vehicles", inst.n_vehicles},
                {"capacity", inst.capacity},
                {"x", inst.x},
                {"y", inst.y},
                {"demand", inst.demand},
                {"ready", inst.ready},
                {"due", inst.due},
                {"service", inst.service},
                {"cost", mat_to_json(inst.cost)},
                {"nominal", mat_to_json(inst.nominal)}};
}

inline Instance instance_from_json(const json& j) {
    Instance inst;
    inst.name = j.at("name").get<std::string>();
    inst.n_customers = j.at("n_customers").get<int>();
    inst.n_vehicles = j.at("n_vehicles").get<int>();
    inst.capacity = j.at("capacity").get<int>();
    inst.x = j.at("x").get<std::vector<double>>();
    inst.y = j.at("y").get<std::vector<double>>();
    inst.demand = j.at("demand").get<std::vector<int>>();
    inst.ready = j.at("ready").get<std::vector<double>>();
    inst.due = j.at("due").get<std::vector<double>>();
    inst.service = j.at("service").get<std::vector<double>>();
    inst.cost = mat_from_json(j.at("cost"));
    inst.nominal = mat_from_json(j.at("nominal"));
    inst.validate();
    return inst;
}

inline json solution_to_json(const Solution& sol) {
    json routes = json::array();
    for (const Route& r : sol.routes) routes.push_back(r.seq);
    return json{{"routes", routes}};
}

inline Solution solution_from_json(const json& j) {
    Solution sol;
    for (const auto& r : j.at("routes")) sol.routes.push_back(Route{r.get<std::vector<int>>()});
    return sol;
}

inline json scenario_set_to_json(const ScenarioSet& s) {
    json sc = json::array();
    for (const Mat& m : s.scenarios) sc.push_back(mat_to_json(m));
    return json{{"weights", s.weights}, {"scenarios", sc}};
}

inline ScenarioSet scenario_set_from_json(const json& j) {
    ScenarioSet s;
    s.weights = j.at("weights").get<std::vector<double>>();
    for (const auto& m : j.at("scenarios")) s.scenarios.push_back(mat_from_json(m));
    return s;
}

}  // namespace csvrptw
