#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "csvrptw/core/instance.hpp"
#include "csvrptw/core/matrix.hpp"
#include "csvrptw/core/route.hpp"
#include "csvrptw/core/serialize.hpp"
#include "csvrptw/core/solomon.hpp"

using namespace csvrptw;

namespace {

// Hand-built 2-customer fixture matching the arrival recursion walkthrough:
// e = [0, 5, 10], t01 = 3, t12 = 4.
Instance two_customer_fixture() {
    Instance inst;
    inst.name = "toy2";
    inst.n_customers = 2;
    inst.n_vehicles = 2;
    inst.capacity = 10;
    inst.demand = {0, 1, 1};
    inst.ready = {0, 5, 10};
    inst.due = {100, 2, 8};
    inst.service = {0, 0, 0};
    inst.cost = Mat(3, 3, 1.0);
    for (int i = 0; i < 3; ++i) inst.cost(i, i) = 0.0;
    inst.nominal = inst.cost;
    return inst;
}

Mat times_for_two_customer() {
    Mat t(3, 3, 1.0);
    for (int i = 0; i < 3; ++i) t(i, i) = 0.0;
    t(0, 1) = 3.0;
    t(1, 2) = 4.0;
    return t;
}

Instance random_instance(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> box(0.0, 100.0);
    std::uniform_int_distribution<int> dem(1, 9);
    Instance inst;
    inst.name = "rand";
    inst.n_customers = n;
    inst.n_vehicles = n;
    inst.capacity = 50;
    const std::size_t nn = static_cast<std::size_t>(n) + 1;
    inst.x.resize(nn);
    inst.y.resize(nn);
    inst.demand.assign(nn, 0);
    inst.ready.assign(nn, 0.0);
    inst.due.assign(nn, 500.0);
    inst.service.assign(nn, 0.0);
    for (std::size_t i = 0; i < nn; ++i) {
        inst.x[i] = box(rng);
        inst.y[i] = box(rng);
        if (i > 0) {
            inst.demand[i] = dem(rng);
            inst.ready[i] = box(rng);
            inst.due[i] = inst.ready[i] + 20.0 + box(rng);
        }
    }
    inst.cost = euclidean_costs(inst.x, inst.y);
    inst.nominal = inst.cost;
    inst.validate();
    return inst;
}

Mat random_times(std::uint64_t seed, const Instance& inst) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> up(0.0, 10.0);
    Mat t = inst.nominal;
    for (std::size_t i = 0; i < t.rows(); ++i)
        for (std::size_t j = 0; j < t.cols(); ++j)
            if (i != j) t(i, j) += up(rng);
    return t;
}

}  // namespace

TEST_CASE("arc index round-trips all off-diagonal pairs") {
    ArcIndex ix(7);
    REQUIRE(ix.arc_count() == 42);
    std::size_t expect = 0;
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 7; ++j) {
            if (i == j) continue;
            REQUIRE(ix.index(i, j) == expect);
            auto [a, b] = ix.arc(expect);
            REQUIRE(a == i);
            REQUIRE(b == j);
            ++expect;
        }
}

TEST_CASE("arc vector flattening inverts") {
    Instance inst = random_instance(11, 5);
    Mat t = random_times(12, inst);
    auto v = to_arc_vector(t);
    REQUIRE(v.size() == 30);
    Mat back = from_arc_vector(v, 6);
    REQUIRE(back == t);
}

TEST_CASE("arrival recursion waits for ready times") {
    Instance inst = two_customer_fixture();
    Mat t = times_for_two_customer();
    Route r{{1, 2}};

    auto a = arrival_times(inst, r, t);
    REQUIRE(a[0] == Catch::Approx(3.0));
    REQUIRE(a[1] == Catch::Approx(9.0));  // departs at max(e1, a1) = 5, plus t12 = 4

    auto s = service_starts(inst, r, t);
    REQUIRE(s[0] == Catch::Approx(5.0));
    REQUIRE(s[1] == Catch::Approx(10.0));
}

TEST_CASE("arrival with zero travel and zero ready is zero") {
    Instance inst = two_customer_fixture();
    inst.ready = {0, 0, 0};
    Mat t(3, 3, 0.0);
    Route r{{1}};
    auto a = arrival_times(inst, r, t);
    REQUIRE(a[0] == 0.0);
    REQUIRE(service_starts(inst, r, t)[0] == 0.0);
}

TEST_CASE("no waiting when all ready times are zero") {
    Instance inst = two_customer_fixture();
    inst.ready = {0, 0, 0};
    Mat t = times_for_two_customer();
    Route r{{1, 2}};
    auto a = arrival_times(inst, r, t);
    REQUIRE(a[1] == Catch::Approx(7.0));  // t01 + t12, no wait at 1
}

TEST_CASE("quadratic penalty on the worked route") {
    Instance inst = two_customer_fixture();
    Mat t = times_for_two_customer();
    Route r{{1, 2}};
    PenaltyFn pen = PenaltyFn::quadratic();
    // a = (3, 9) against due = (2, 8): two units of lateness squared.
    REQUIRE(route_penalty(inst, r, t, pen) == Catch::Approx(2.0));

    Route single{{1}};
    REQUIRE(route_penalty(inst, single, t, pen) == Catch::Approx(1.0));

    inst.due = {100, 50, 50};
    REQUIRE(route_penalty(inst, r, t, pen) == 0.0);
}

TEST_CASE("penalty function basics") {
    PenaltyFn q = PenaltyFn::quadratic();
    REQUIRE(q(-3.0) == 0.0);
    REQUIRE(q(0.0) == 0.0);
    REQUIRE(q(2.0) == 4.0);
    PenaltyFn lin = PenaltyFn::linear(2.5);
    REQUIRE(lin(2.0) == 5.0);
    REQUIRE(lin(-1.0) == 0.0);
    REQUIRE_THROWS_AS(PenaltyFn::from_name("cubic"), ConfigError);
}

TEST_CASE("solution value composes route costs and penalties") {
    Instance inst = random_instance(21, 4);
    Mat t = random_times(22, inst);
    PenaltyFn pen = PenaltyFn::quadratic();
    Solution sol;
    sol.routes = {Route{{1, 3}}, Route{{4, 2}}};
    sol.validate(inst);

    double manual = 0.0;
    for (const Route& r : sol.routes) manual += route_cost(inst, r) + route_penalty(inst, r, t, pen);
    REQUIRE(solution_value_single(inst, sol, t, pen) == Catch::Approx(manual).epsilon(1e-12));

    ScenarioSet scen = ScenarioSet::uniform({t, random_times(23, inst)});
    scen.validate(inst);
    Objective obj = solution_value(inst, sol, scen, pen);
    REQUIRE(obj.total == Catch::Approx(obj.first_stage + obj.expected_penalty));
    double manual2 = 0.0;
    for (const Route& r : sol.routes)
        manual2 += route_cost(inst, r) + expected_route_penalty(inst, r, scen, pen);
    REQUIRE(obj.total == Catch::Approx(manual2).epsilon(1e-12));
}

TEST_CASE("solution validation catches bad covers") {
    Instance inst = random_instance(31, 4);
    Solution missing;
    missing.routes = {Route{{1, 2}}};
    REQUIRE_THROWS_AS(missing.validate(inst), ValidationError);

    Solution twice;
    twice.routes = {Route{{1, 2}}, Route{{2, 3, 4}}};
    REQUIRE_THROWS_AS(twice.validate(inst), ValidationError);

    Solution toomany;
    inst.n_vehicles = 1;
    toomany.routes = {Route{{1, 2}}, Route{{3, 4}}};
    REQUIRE_THROWS_AS(toomany.validate(inst), ValidationError);
}

TEST_CASE("translation covariance of the arrival recursion") {
    Instance inst = random_instance(41, 6);
    Mat t = random_times(42, inst);
    Route r{{2, 5, 1, 6}};
    auto base_a = arrival_times(inst, r, t);
    auto base_s = service_starts(inst, r, t);

    const double delta = 7.5;
    Mat shifted = t;
    shifted(0, 2) += delta;
    auto a = arrival_times(inst, r, shifted);
    auto s = service_starts(inst, r, shifted);
    REQUIRE(a[0] == Catch::Approx(base_a[0] + delta));
    for (std::size_t k = 0; k < s.size(); ++k) REQUIRE(s[k] >= base_s[k] - 1e-12);
}

TEST_CASE("route penalty is monotone in travel times") {
    Instance inst = random_instance(51, 6);
    Mat t = random_times(52, inst);
    Route r{{3, 1, 4}};
    PenaltyFn pen = PenaltyFn::quadratic();
    const double base = route_penalty(inst, r, t, pen);
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 50; ++trial) {
        Mat bump = t;
        std::size_t i = rng() % 7, j = rng() % 7;
        if (i == j) continue;
        bump(i, j) += 5.0;
        REQUIRE(route_penalty(inst, r, bump, pen) >= base - 1e-12);
    }
}

TEST_CASE("parses the R101 subset with header semantics") {
    SolomonData data = parse_solomon_file(std::string(CSVRPTW_DATA_DIR) + "/R101.txt");
    REQUIRE(data.name == "R101");
    REQUIRE(data.n_vehicles == 25);
    REQUIRE(data.capacity == 200);
    REQUIRE(data.rows.size() == 26);

    Instance inst = make_instance(data, 25);
    REQUIRE(inst.n_customers == 25);
    REQUIRE(inst.n_vehicles == 25);
    REQUIRE(inst.capacity == 200);
    // Service time of the origin is folded into outgoing nominal times.
    REQUIRE(inst.nominal(1, 2) == Catch::Approx(inst.cost(1, 2) + 10.0));
    REQUIRE(inst.nominal(0, 1) == Catch::Approx(inst.cost(0, 1)));
    // Costs stay unrounded Euclidean.
    REQUIRE(inst.cost(0, 1) == Catch::Approx(std::hypot(41.0 - 35.0, 49.0 - 35.0)));

    Instance trunc = make_instance(data, 15);
    REQUIRE(trunc.n_customers == 15);
    REQUIRE(trunc.n_vehicles == 25);
    REQUIRE_THROWS_AS(make_instance(data, 26), ValidationError);
}

TEST_CASE("triangle inequality holds for Euclidean costs") {
    SolomonData data = parse_solomon_file(std::string(CSVRPTW_DATA_DIR) + "/RC101.txt");
    Instance inst = make_instance(data, 25);
    const std::size_t n = 26;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                REQUIRE(inst.cost(i, j) <= inst.cost(i, k) + inst.cost(k, j) + 1e-9);
}

TEST_CASE("parses a single-customer toy") {
    const std::string text =
        "toy\n\nVEHICLE\nNUMBER CAPACITY\n  1  10\n\nCUSTOMER\n"
        "CUST NO. XCOORD. YCOORD. DEMAND READY DUE SERVICE\n"
        " 0 0 0 0 0 100 0\n"
        " 1 3 4 5 10 20 2\n";
    SolomonData data = parse_solomon(text);
    Instance inst = make_instance(data);
    REQUIRE(inst.n_customers == 1);
    REQUIRE(inst.cost(0, 1) == Catch::Approx(5.0));
    REQUIRE(inst.nominal(1, 0) == Catch::Approx(7.0));  // 5 + service 2
}

TEST_CASE("parse errors carry context") {
    REQUIRE_THROWS_AS(parse_solomon(""), ParseError);
    REQUIRE_THROWS_AS(parse_solomon("name\nVEHICLE\nh\n 1 10\nCUSTOMER\nh\n"), ParseError);
    const std::string bad_row =
        "toy\n\nVEHICLE\nNUMBER CAPACITY\n 1 10\n\nCUSTOMER\nheader\n 0 0 0 0 0 100 0\n 1 2\n";
    REQUIRE_THROWS_WITH(parse_solomon(bad_row), Catch::Matchers::ContainsSubstring("line 10"));

    // e > l must be rejected at instance construction.
    const std::string bad_window =
        "toy\n\nVEHICLE\nNUMBER CAPACITY\n 1 10\n\nCUSTOMER\nheader\n"
        " 0 0 0 0 0 100 0\n 1 3 4 5 50 20 0\n";
    SolomonData d = parse_solomon(bad_window);
    REQUIRE_THROWS_AS(make_instance(d), ValidationError);

    const std::string dup =
        "toy\n\nVEHICLE\nNUMBER CAPACITY\n 1 10\n\nCUSTOMER\nheader\n"
        " 0 0 0 0 0 100 0\n 1 3 4 5 1 20 0\n 1 5 6 2 1 30 0\n";
    REQUIRE_THROWS_AS(parse_solomon(dup), ParseError);
}

TEST_CASE("solomon text round-trips") {
    SolomonData data = parse_solomon_file(std::string(CSVRPTW_DATA_DIR) + "/C101.txt");
    SolomonData again = parse_solomon(serialize_solomon(data));
    REQUIRE(again.name == data.name);
    REQUIRE(again.n_vehicles == data.n_vehicles);
    REQUIRE(again.capacity == data.capacity);
    REQUIRE(again.rows.size() == data.rows.size());
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        REQUIRE(again.rows[i].id == data.rows[i].id);
        REQUIRE(again.rows[i].x == data.rows[i].x);
        REQUIRE(again.rows[i].ready == data.rows[i].ready);
        REQUIRE(again.rows[i].service == data.rows[i].service);
    }
}

TEST_CASE("instance JSON round-trips identically") {
    SolomonData data = parse_solomon_file(std::string(CSVRPTW_DATA_DIR) + "/R101.txt");
    Instance inst = make_instance(data, 10);
    json j = instance_to_json(inst);
    Instance back = instance_from_json(j);
    REQUIRE(instance_to_json(back) == j);
    REQUIRE(back.cost == inst.cost);
    REQUIRE(back.nominal == inst.nominal);
    REQUIRE(back.demand == inst.demand);

    Solution sol;
    sol.routes = {Route{{1, 2, 3}}, Route{{4}}};
    Solution sback = solution_from_json(solution_to_json(sol));
    REQUIRE(sback.routes == sol.routes);
}

TEST_CASE("scenario set validation") {
    Instance inst = random_instance(61, 3);
    Mat t = random_times(62, inst);
    ScenarioSet ok = ScenarioSet::uniform({t});
    ok.validate(inst);

    ScenarioSet bad = ok;
    bad.weights = {0.5};
    REQUIRE_THROWS_AS(bad.validate(inst), ValidationError);

    ScenarioSet below = ok;
    below.scenarios[0](1, 2) = inst.nominal(1, 2) - 1.0;
    REQUIRE_THROWS_AS(below.validate(inst), ValidationError);

    ScenarioSet empty;
    REQUIRE_THROWS_AS(empty.validate(inst), ValidationError);
}

TEST_CASE("instance validation rejects zero-demand customers") {
    Instance inst = random_instance(71, 3);
    inst.demand[2] = 0;
    REQUIRE_THROWS_AS(inst.validate(), ValidationError);
    inst.demand[2] = inst.capacity + 1;
    REQUIRE_THROWS_AS(inst.validate(), ValidationError);
}
