#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "csvrptw/harness/oracle.hpp"
#include "csvrptw/harness/toy.hpp"
#include "csvrptw/learn/mlp.hpp"
#include "csvrptw/penalty_model/fpf.hpp"
#include "csvrptw/solver/branch_and_price.hpp"

using namespace csvrptw;

namespace {

Instance box_instance(std::vector<double> xs, std::vector<double> ys, std::vector<int> demand,
                      std::vector<double> due, int vehicles, int capacity) {
    Instance inst;
    inst.name = "box";
    inst.n_customers = static_cast<int>(xs.size()) - 1;
    inst.n_vehicles = vehicles;
    inst.capacity = capacity;
    inst.x = std::move(xs);
    inst.y = std::move(ys);
    inst.demand = std::move(demand);
    inst.ready.assign(inst.x.size(), 0.0);
    inst.due = std::move(due);
    inst.service.assign(inst.x.size(), 0.0);
    inst.cost = euclidean_costs(inst.x, inst.y);
    inst.nominal = inst.cost;
    inst.validate();
    return inst;
}

ScenarioSet jitter_scenarios(const Instance& inst, std::size_t count, std::uint64_t seed,
                             double spread) {
    std::mt19937_64 rng = make_rng(seed);
    std::uniform_real_distribution<double> u(0.0, spread);
    const auto n = static_cast<std::size_t>(inst.n_nodes());
    std::vector<Mat> mats;
    mats.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        Mat t = inst.nominal;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) t(i, j) += u(rng);
        mats.push_back(std::move(t));
    }
    return ScenarioSet::uniform(std::move(mats));
}

// Depot far from a tight customer cluster: pairing any two customers is
// much cheaper than serving them alone, so the root LP picks three half
// pair-routes and must branch.
Instance clustered_triangle() {
    return box_instance({0.0, 10.0, 10.0, 10.0}, {0.0, 0.0, 1.0, -1.0}, {0, 1, 1, 1},
                        {1e4, 1e4, 1e4, 1e4}, 2, 2);
}

PenaltyPredictor zero_predictor(const Instance& inst) {
    PenaltyPredictor model;
    model.x = Eigen::Vector2d(0.4, 0.6);
    model.t_hat = inst.nominal;
    const auto arcs = inst.arc_index().arc_count();
    model.cov.sigma = 0.1 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(arcs),
                                                      static_cast<Eigen::Index>(arcs));
    model.cov.dof = 8;
    model.early.by_customer.resize(static_cast<std::size_t>(inst.n_nodes()));
    model.mlp = zero_mlp(fpf_dim(2));
    model.pen = PenaltyFn::quadratic();
    return model;
}

}  // namespace

TEST_CASE("one-customer column generation reproduces the closed form") {
    // c01 = 5, due 6; the delayed scenario arrives at 8, so the expected
    // penalty is 0.5 * (8-6)^2 = 2 and the LP value is 10 + 2.
    Instance inst = box_instance({0.0, 3.0}, {0.0, 4.0}, {0, 1}, {100.0, 6.0}, 1, 5);
    std::vector<Mat> mats(2, inst.nominal);
    mats[1](0, 1) += 3.0;
    const SolveObjective obj =
        SolveObjective::scenario_based(ScenarioSet::uniform(std::move(mats)),
                                       PenaltyFn::quadratic());

    ColumnPool pool;
    seed_pool(pool, inst, obj);
    const CgOutcome cg =
        column_generation(inst, obj, pool, ArcRules(inst), true, PricingOptions{});
    CHECK(cg.bound_valid);
    CHECK_FALSE(cg.infeasible);
    CHECK(cg.value == Catch::Approx(12.0).margin(1e-9));
    CHECK(cg.lp.z[0] == Catch::Approx(0.0).margin(1e-9));  // big-M stays out
}

TEST_CASE("column generation bounds the enumeration optimum from below") {
    for (std::uint64_t seed : {201u, 202u, 203u}) {
        ToyOptions topt;
        topt.n_customers = 5;
        const Instance inst = random_toy_instance(seed, topt);
        const SolveObjective obj = SolveObjective::scenario_based(
            jitter_scenarios(inst, 2, seed + 5, 10.0), PenaltyFn::quadratic());

        ColumnPool pool;
        seed_pool(pool, inst, obj);
        const CgOutcome cg =
            column_generation(inst, obj, pool, ArcRules(inst), true, PricingOptions{});
        REQUIRE(cg.bound_valid);

        const OracleResult oracle =
            brute_force_optimum(inst, [&](const Route& r) { return obj.route_total(inst, r); });
        REQUIRE(oracle.feasible);
        CHECK(cg.value <= oracle.value + 1e-9);

        // converged duals price nothing new; columns pinned at their upper
        // bound may legitimately reappear with negative reduced cost
        const PricingResult res = obj.price(inst, cg.duals, ArcRules(inst), PricingOptions{});
        for (const PricedRoute& pr : res.routes) CHECK(pool.find(pr.route).has_value());
    }
}

TEST_CASE("root-integral instance solves without branching") {
    const Instance inst =
        box_instance({0.0, 3.0, 0.0}, {0.0, 0.0, 4.0}, {0, 1, 1}, {1e4, 1e4, 1e4}, 2, 10);
    const SolveObjective obj = SolveObjective::scenario_based(
        ScenarioSet::uniform({inst.nominal}), PenaltyFn::quadratic());

    const SolveReport rep = branch_and_price(inst, obj);
    CHECK(rep.status == SolveStatus::optimal);
    CHECK(rep.nodes == 1);
    CHECK(rep.upper == Catch::Approx(12.0).margin(1e-9));
    CHECK(rep.gap == Catch::Approx(0.0).margin(1e-12));
    rep.incumbent.validate(inst);
}

TEST_CASE("branch and price equals the set partition oracle") {
    for (std::uint64_t seed = 210; seed < 222; ++seed) {
        ToyOptions topt;
        topt.n_customers = 4 + static_cast<int>(seed % 3);
        const Instance inst = random_toy_instance(seed, topt);
        const std::size_t n_scen = 1 + (seed % 3) * 2;
        const SolveObjective obj = SolveObjective::scenario_based(
            jitter_scenarios(inst, n_scen, seed + 31, 12.0), PenaltyFn::quadratic());

        const SolveReport rep = branch_and_price(inst, obj);
        const OracleResult oracle =
            brute_force_optimum(inst, [&](const Route& r) { return obj.route_total(inst, r); });

        REQUIRE(oracle.feasible);
        REQUIRE(rep.status == SolveStatus::optimal);
        CHECK(rep.upper == Catch::Approx(oracle.value).margin(1e-6));
        CHECK(rep.gap <= 1e-6);
        CHECK(rep.root_lp <= rep.upper + 1e-9);
        rep.incumbent.validate(inst);
        CHECK(obj.solution_total(inst, rep.incumbent) == Catch::Approx(rep.upper).margin(1e-9));
    }
}

TEST_CASE("fractional root branches down to the oracle") {
    const Instance inst = clustered_triangle();
    const SolveObjective obj = SolveObjective::scenario_based(
        ScenarioSet::uniform({inst.nominal}), PenaltyFn::quadratic());

    const SolveReport rep = branch_and_price(inst, obj);
    const OracleResult oracle = brute_force_scenario_optimum(inst, obj.scenarios(), obj.penalty());

    REQUIRE(rep.status == SolveStatus::optimal);
    CHECK(rep.nodes > 1);  // the pairing relaxation is fractional by design
    CHECK(rep.upper == Catch::Approx(oracle.value).margin(1e-6));
    CHECK(rep.root_lp < oracle.value - 1e-6);
}

TEST_CASE("fleet of one returns the unique tour or proves infeasibility") {
    SECTION("feasible: the tight second window fixes the visit order") {
        Instance inst =
            box_instance({0.0, 3.0, 0.0}, {0.0, 0.0, 4.0}, {0, 1, 1}, {1e4, 1e4, 5.0}, 1, 4);
        const SolveObjective obj = SolveObjective::scenario_based(
            ScenarioSet::uniform({inst.nominal}), PenaltyFn::quadratic());

        const SolveReport rep = branch_and_price(inst, obj);
        const OracleResult oracle =
            brute_force_scenario_optimum(inst, obj.scenarios(), obj.penalty());
        REQUIRE(rep.status == SolveStatus::optimal);
        REQUIRE(rep.incumbent.routes.size() == 1);
        CHECK(rep.upper == Catch::Approx(oracle.value).margin(1e-6));
        // visiting c2 first reaches it at 4 < 5; the other order pays 3^2
        CHECK(rep.incumbent.routes[0].seq == std::vector<int>{2, 1});
    }

    SECTION("infeasible: two big demands cannot share the single vehicle") {
        Instance inst =
            box_instance({0.0, 3.0, 0.0}, {0.0, 0.0, 4.0}, {0, 6, 5}, {1e4, 1e4, 1e4}, 1, 10);
        const SolveObjective obj = SolveObjective::scenario_based(
            ScenarioSet::uniform({inst.nominal}), PenaltyFn::quadratic());

        const OracleResult oracle =
            brute_force_scenario_optimum(inst, obj.scenarios(), obj.penalty());
        CHECK_FALSE(oracle.feasible);

        const SolveReport rep = branch_and_price(inst, obj);
        CHECK(rep.status == SolveStatus::infeasible);
        CHECK(rep.incumbent.routes.empty());

        ColumnPool pool;
        seed_pool(pool, inst, obj);
        CHECK_THROWS_AS(
            column_generation(inst, obj, pool, ArcRules(inst), true, PricingOptions{}),
            InfeasibleError);
    }
}

TEST_CASE("forbidding an arc never lowers the root bound") {
    ToyOptions topt;
    topt.n_customers = 5;
    const Instance inst = random_toy_instance(231, topt);
    const SolveObjective obj = SolveObjective::scenario_based(
        jitter_scenarios(inst, 2, 232, 10.0), PenaltyFn::quadratic());

    ColumnPool pool;
    seed_pool(pool, inst, obj);
    const CgOutcome base =
        column_generation(inst, obj, pool, ArcRules(inst), true, PricingOptions{});
    REQUIRE(base.bound_valid);

    for (auto arc : {std::pair<int, int>{1, 2}, {2, 3}, {0, 4}, {5, 0}}) {
        ArcRules rules(inst);
        rules.forbid(static_cast<std::size_t>(arc.first), static_cast<std::size_t>(arc.second));
        ColumnPool fresh;
        seed_pool(fresh, inst, obj);
        const CgOutcome restricted =
            column_generation(inst, obj, fresh, rules, true, PricingOptions{});
        REQUIRE(restricted.bound_valid);
        CHECK(restricted.value >= base.value - 1e-9);
    }
}

TEST_CASE("identical runs return identical reports") {
    ToyOptions topt;
    topt.n_customers = 6;
    const Instance inst = random_toy_instance(241, topt);
    const SolveObjective obj = SolveObjective::scenario_based(
        jitter_scenarios(inst, 3, 242, 10.0), PenaltyFn::quadratic());

    const SolveReport a = branch_and_price(inst, obj);
    const SolveReport b = branch_and_price(inst, obj);
    CHECK(a.upper == b.upper);
    CHECK(a.lower == b.lower);
    CHECK(a.nodes == b.nodes);
    CHECK(a.pricing.created == b.pricing.created);
    CHECK(a.incumbent.same_structure(b.incumbent));
}

TEST_CASE("pool deduplicates by visit sequence") {
    const Instance inst =
        box_instance({0.0, 3.0, 0.0}, {0.0, 0.0, 4.0}, {0, 1, 1}, {1e4, 1e4, 1e4}, 2, 10);
    const SolveObjective obj = SolveObjective::scenario_based(
        ScenarioSet::uniform({inst.nominal}), PenaltyFn::quadratic());

    ColumnPool pool;
    CHECK(pool.add(inst, obj, Route{{1, 2}}).has_value());
    CHECK_FALSE(pool.add(inst, obj, Route{{1, 2}}).has_value());
    CHECK(pool.add(inst, obj, Route{{2, 1}}).has_value());
    CHECK(pool.size() == 2);
    CHECK(pool.at(0).cost == Catch::Approx(12.0).margin(1e-12));
    CHECK(pool.at(0).load == 2);
    CHECK(pool.at(0).mask == 0b110);
}

TEST_CASE("predictor objective solves to the travel cost partition") {
    ToyOptions topt;
    topt.n_customers = 4;
    const Instance inst = random_toy_instance(251, topt);
    std::vector<Mat> periods(3, inst.nominal);
    const SolveObjective obj =
        SolveObjective::predictor_based(zero_predictor(inst), std::move(periods));

    const SolveReport rep = branch_and_price(inst, obj);
    const OracleResult oracle =
        brute_force_optimum(inst, [&](const Route& r) { return route_cost(inst, r); });

    REQUIRE(rep.status == SolveStatus::optimal);
    CHECK(rep.upper == Catch::Approx(oracle.value).margin(1e-6));
    CHECK(rep.root_lp <= rep.upper + 1e-9);
    rep.incumbent.validate(inst);
}

TEST_CASE("node limit reports an honest gap") {
    const Instance inst = clustered_triangle();
    const SolveObjective obj = SolveObjective::scenario_based(
        ScenarioSet::uniform({inst.nominal}), PenaltyFn::quadratic());

    SolveLimits limits;
    limits.node_limit = 1;
    const SolveReport rep = branch_and_price(inst, obj, limits);
    CHECK(rep.status == SolveStatus::limit);
    CHECK(rep.nodes == 1);
    CHECK(rep.lower <= rep.upper);
    CHECK(rep.gap > 1e-6);
}

TEST_CASE("trace log writes one row per processed node") {
    const Instance inst = clustered_triangle();
    const SolveObjective obj = SolveObjective::scenario_based(
        ScenarioSet::uniform({inst.nominal}), PenaltyFn::quadratic());

    std::ostringstream trace;
    SolveLimits limits;
    limits.trace = &trace;
    const SolveReport rep = branch_and_price(inst, obj, limits);

    const std::string text = trace.str();
    CHECK(text.rfind("node,depth,bound,lp,action,upper,open\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    CHECK(lines >= rep.nodes);
}

TEST_CASE("solve report serializes to json") {
    const Instance inst =
        box_instance({0.0, 3.0, 0.0}, {0.0, 0.0, 4.0}, {0, 1, 1}, {1e4, 1e4, 1e4}, 2, 10);
    const SolveObjective obj = SolveObjective::scenario_based(
        ScenarioSet::uniform({inst.nominal}), PenaltyFn::quadratic());

    const std::string js = branch_and_price(inst, obj).to_json();
    CHECK(js.find("\"status\":\"optimal\"") != std::string::npos);
    CHECK(js.find("\"routes\":[[") != std::string::npos);
    CHECK(js.front() == '{');
    CHECK(js.back() == '}');
}

TEST_CASE("greedy seeding covers every customer") {
    for (std::uint64_t seed : {261u, 262u, 263u}) {
        ToyOptions topt;
        topt.n_customers = 7;
        const Instance inst = random_toy_instance(seed, topt);
        const std::vector<Route> routes = greedy_insertion_routes(inst);
        std::vector<int> seen(static_cast<std::size_t>(inst.n_nodes()), 0);
        for (const Route& r : routes) {
            CHECK(route_load(inst, r) <= inst.capacity);
            for (int v : r.seq) ++seen[static_cast<std::size_t>(v)];
        }
        for (int j = 1; j <= inst.n_customers; ++j)
            CHECK(seen[static_cast<std::size_t>(j)] == 1);
    }
}
