#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "csvrptw/harness/toy.hpp"
#include "csvrptw/penalty_model/early.hpp"
#include "csvrptw/penalty_model/fpf.hpp"
#include "csvrptw/penalty_model/risk.hpp"
#include "csvrptw/penalty_model/training.hpp"

using namespace csvrptw;

namespace {

// Two customers with known geometry: depot (0,0), c1 (3,4), c2 (3,0).
// Distances: 0-1 = 5, 0-2 = 3, 1-2 = 4. Zero service times.
Instance tiny_instance() {
    Instance inst;
    inst.name = "tiny";
    inst.n_customers = 2;
    inst.n_vehicles = 2;
    inst.capacity = 10;
    inst.x = {0.0, 3.0, 3.0};
    inst.y = {0.0, 4.0, 0.0};
    inst.demand = {0, 1, 1};
    inst.ready = {0.0, 2.0, 30.0};
    inst.due = {100.0, 4.0, 40.0};
    inst.service = {0.0, 0.0, 0.0};
    inst.cost = euclidean_costs(inst.x, inst.y);
    inst.nominal = inst.cost;
    inst.validate();
    return inst;
}

// Diagonal 1..6 in arc order plus one adjacent-arc covariance between
// (0,1) and (1,2).
CovEstimate tiny_cov() {
    Eigen::VectorXd d(6);
    d << 1, 2, 3, 4, 5, 6;
    Eigen::MatrixXd s = d.asDiagonal();
    s(0, 3) = s(3, 0) = 0.5;
    return {s, 10};
}

Mat plus_one(const Instance& inst) {
    Mat t = inst.nominal;
    for (std::size_t i = 0; i < t.rows(); ++i)
        for (std::size_t j = 0; j < t.cols(); ++j)
            if (i != j) t(i, j) += 1.0;
    return t;
}

EarlyArrivalModel constant_model(const Instance& inst, double freq) {
    EarlyArrivalModel m;
    m.by_customer.resize(static_cast<std::size_t>(inst.n_nodes()));
    for (auto& pc : m.by_customer) {
        pc.use_logit = false;
        pc.freq = freq;
    }
    return m;
}

Route random_route(const Instance& inst, std::mt19937_64& rng) {
    std::vector<int> ids(static_cast<std::size_t>(inst.n_customers));
    std::iota(ids.begin(), ids.end(), 1);
    std::shuffle(ids.begin(), ids.end(), rng);
    std::uniform_int_distribution<std::size_t> len(1, ids.size());
    ids.resize(len(rng));
    return Route{ids};
}

}  // namespace

TEST_CASE("projection matches the hand-computed rows") {
    Instance inst = tiny_instance();
    CovEstimate cov = tiny_cov();
    PenaltyFn pen = PenaltyFn::quadratic();
    Mat t_hat = plus_one(inst);
    Route r{{1, 2}};
    Eigen::VectorXd x(2);
    x << 1.0, 0.5;

    // risk with supplied probabilities 0.2 / 0.3:
    //   xi_1 = 0.8 * 1 = 0.8
    //   xi_2 = 0.7 * (0.8 + 4 + 2*0.5) = 4.06
    RiskState risk = propagate_risk(r, inst, cov.sigma, {0.2, 0.3});
    REQUIRE(risk.xi[0] == Catch::Approx(0.8).margin(1e-12));
    REQUIRE(risk.xi[1] == Catch::Approx(4.06).margin(1e-12));

    Eigen::VectorXd y1 = project(x, r, 1, inst, pen, t_hat, cov, risk);
    Eigen::VectorXd expect1(18);
    expect1 << 1.0, 0.5, 2, 4, 100, 5, 1, 1, 5, 5, 1, 1, 6, 6, 6, 2, 4, 0.8;
    REQUIRE(y1.size() == 18);
    for (Eigen::Index s = 0; s < 18; ++s)
        REQUIRE(y1(s) == Catch::Approx(expect1(s)).margin(1e-12));

    Eigen::VectorXd y2 = project(x, r, 2, inst, pen, t_hat, cov, risk);
    Eigen::VectorXd expect2(18);
    expect2 << 1.0, 0.5, 30, 40, 4, 4, 4, 2, 9, 30, 0, 0, 5, 11, 30, 0, 0, 4.06;
    for (Eigen::Index s = 0; s < 18; ++s)
        REQUIRE(y2(s) == Catch::Approx(expect2(s)).margin(1e-12));
}

TEST_CASE("projection under nominal predictions collapses groups c and d") {
    Instance inst = random_toy_instance(300, {.n_customers = 5});
    CovEstimate cov{Eigen::MatrixXd::Identity(30, 30), 5};
    PenaltyFn pen = PenaltyFn::quadratic();
    Route r{{3, 1, 5}};
    RiskState risk = propagate_risk(r, inst, cov.sigma, {0.0, 0.0, 0.0});
    Eigen::VectorXd x = Eigen::VectorXd::Ones(3);
    const int p = 3;
    for (int customer : r.seq) {
        Eigen::VectorXd y = project(x, r, customer, inst, pen, inst.nominal, cov, risk);
        for (int s = 0; s < 4; ++s)
            REQUIRE(y(p + 6 + s) == Catch::Approx(y(p + 11 + s)).margin(1e-12));
    }
}

TEST_CASE("projection dimension bookkeeping and errors") {
    REQUIRE(fpf_dim(2) == 18);
    REQUIRE(fpf_names(2).size() == 18);
    REQUIRE(fpf_names(7).size() == 23);
    Instance inst = tiny_instance();
    CovEstimate cov = tiny_cov();
    Route r{{1}};
    RiskState risk = propagate_risk(r, inst, cov.sigma, {0.5});
    Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
    REQUIRE_THROWS_AS(
        project(x, r, 2, inst, PenaltyFn::quadratic(), inst.nominal, cov, risk),
        ValidationError);
    RiskState short_risk;
    short_risk.xi = {};
    REQUIRE_THROWS_AS(
        project(x, r, 1, inst, PenaltyFn::quadratic(), inst.nominal, cov, short_risk),
        ValidationError);
}

TEST_CASE("risk vanishes under certain early arrival") {
    Instance inst = tiny_instance();
    Route r{{1, 2}};
    RiskState st = propagate_risk(r, inst, tiny_cov().sigma, {1.0, 1.0});
    REQUIRE(st.xi[0] == 0.0);
    REQUIRE(st.xi[1] == 0.0);
}

TEST_CASE("risk with no early arrivals telescopes diagonal variances") {
    Instance inst = random_toy_instance(301, {.n_customers = 4});
    const ArcIndex ix = inst.arc_index();
    Eigen::VectorXd d(static_cast<Eigen::Index>(ix.arc_count()));
    for (Eigen::Index a = 0; a < d.size(); ++a) d(a) = 0.5 + 0.1 * static_cast<double>(a);
    Eigen::MatrixXd sigma = d.asDiagonal();
    Route r{{2, 4, 1}};
    RiskState st = propagate_risk(r, inst, sigma, {0.0, 0.0, 0.0});
    double acc = 0.0;
    int prev = 0;
    for (std::size_t k = 0; k < r.seq.size(); ++k) {
        acc += sigma(static_cast<Eigen::Index>(
                         ix.index(static_cast<std::size_t>(prev),
                                  static_cast<std::size_t>(r.seq[k]))),
                     static_cast<Eigen::Index>(
                         ix.index(static_cast<std::size_t>(prev),
                                  static_cast<std::size_t>(r.seq[k]))));
        REQUIRE(st.xi[k] == Catch::Approx(acc).margin(1e-12));
        prev = r.seq[k];
    }
}

TEST_CASE("risk recursion handles adjacent covariance and probability mix") {
    Instance inst = tiny_instance();
    // P = (0, 1): second factor kills xi_2 while xi_1 survives in full
    RiskState st = propagate_risk(Route{{1, 2}}, inst, tiny_cov().sigma, {0.0, 1.0});
    REQUIRE(st.xi[0] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(st.xi[1] == 0.0);
    REQUIRE_THROWS_AS(propagate_risk(Route{{1, 2}}, inst, tiny_cov().sigma, {0.0, 1.5}),
                      ValidationError);
    REQUIRE_THROWS_AS(propagate_risk(Route{{1, 2}}, inst, tiny_cov().sigma, {0.0}),
                      ValidationError);
}

TEST_CASE("risk stays nonnegative for random inputs") {
    std::mt19937_64 rng = make_rng(31);
    Instance inst = random_toy_instance(302, {.n_customers = 6});
    const auto arcs = static_cast<Eigen::Index>(inst.arc_index().arc_count());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        Eigen::MatrixXd f(arcs, 3);
        for (Eigen::Index i = 0; i < arcs; ++i)
            for (Eigen::Index j = 0; j < 3; ++j) f(i, j) = 2.0 * u(rng) - 1.0;
        Eigen::MatrixXd sigma = f * f.transpose();  // PSD with negative off-diagonals
        Route r = random_route(inst, rng);
        std::vector<double> probs(r.seq.size());
        for (double& p : probs) p = u(rng);
        RiskState st = propagate_risk(r, inst, sigma, probs);
        for (double xi : st.xi) REQUIRE(xi >= 0.0);
    }
}

TEST_CASE("early arrival hard zeros") {
    Instance inst = tiny_instance();
    EarlyArrivalModel model = constant_model(inst, 0.9);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(7);

    // customer 2 first on its route: e = 30, prefix cost 3, no predecessors
    REQUIRE(estimate_early_arrival(inst, Route{{2}}, 0, model, w) == 0.9);

    // e_i = 0 silences the model
    Instance z = inst;
    z.ready[2] = 0.0;
    REQUIRE(estimate_early_arrival(z, Route{{2}}, 0, model, w) == 0.0);

    // prefix cost beyond the window opening: 0-1-2 costs 5 + 4 = 9 > e_1? no;
    // use customer 1 second on the route, prefix 3 + 4 = 7 > e_1 = 2
    REQUIRE(estimate_early_arrival(inst, Route{{2, 1}}, 1, model, w) == 0.0);

    // a predecessor window opening later than e_i
    Instance late_pred = inst;
    late_pred.ready = {0.0, 40.0, 30.0};
    late_pred.due = {100.0, 50.0, 40.0};
    REQUIRE(estimate_early_arrival(late_pred, Route{{1, 2}}, 1, model, w) == 0.0);
}

TEST_CASE("neutral logit gives one half when no rule fires") {
    Instance inst = tiny_instance();
    EarlyArrivalModel model;
    model.by_customer.resize(3);
    model.by_customer[2].use_logit = true;
    model.by_customer[2].logit.coef = Eigen::VectorXd::Zero(7);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(7);
    REQUIRE(estimate_early_arrival(inst, Route{{2}}, 0, model, w) == 0.5);
}

TEST_CASE("hard zeros dominate any fitted model on random routes") {
    std::mt19937_64 rng = make_rng(32);
    Instance inst = random_toy_instance(303, {.n_customers = 6});
    EarlyArrivalModel model = constant_model(inst, 0.9);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(5);
    for (int trial = 0; trial < 200; ++trial) {
        Route r = random_route(inst, rng);
        std::uniform_int_distribution<std::size_t> pick(0, r.seq.size() - 1);
        const std::size_t pos = pick(rng);
        const auto i = static_cast<std::size_t>(r.seq[pos]);
        const bool zero_rule = inst.ready[i] <= 0.0 ||
                               prefix_cost(inst, r, pos) > inst.ready[i] ||
                               max_prev_ready(inst, r, pos) > inst.ready[i];
        const double est = estimate_early_arrival(inst, r, pos, model, w);
        REQUIRE(est == (zero_rule ? 0.0 : 0.9));
    }
}

TEST_CASE("early covariates assemble the documented slots") {
    Instance inst = tiny_instance();
    CovEstimate cov = tiny_cov();
    Mat t_hat = plus_one(inst);
    Eigen::VectorXd x(2);
    x << 1.0, 0.5;
    Eigen::VectorXd w = early_covariates(x, inst, Route{{1, 2}}, 1, t_hat, cov);
    REQUIRE(w.size() == 7);
    REQUIRE(w(0) == 1.0);
    REQUIRE(w(1) == 0.5);
    REQUIRE(w(2) == 30.0);                              // e_2
    REQUIRE(w(3) == Catch::Approx(11.0).margin(1e-12)); // arrival under t_hat
    REQUIRE(w(4) == Catch::Approx(4.0).margin(1e-12));  // var of arc (1,2)
    REQUIRE(w(5) == 2.0);                               // e_1 opens before
    REQUIRE(w(6) == Catch::Approx(9.0).margin(1e-12));  // cost 5 + 4
    REQUIRE(early_covariate_names(2).size() == 7);
}

TEST_CASE("early training harvest labels arrivals against the windows") {
    Instance inst = tiny_instance();
    // two periods: actual times nominal (arrival at c2 = 9 <= 30, early)
    // and nominal + 30 on every arc (arrival 35 + ... > 30, late)
    const ArcIndex ix = inst.arc_index();
    Eigen::MatrixXd X(2, 1);
    X << 1.0, 1.0;
    Eigen::MatrixXd T(2, 6);
    for (Eigen::Index a = 0; a < 6; ++a) {
        auto [i, j] = ix.arc(static_cast<std::size_t>(a));
        T(0, a) = inst.nominal(i, j);
        T(1, a) = inst.nominal(i, j) + 30.0;
    }
    // intercept-only design keeps the fit valid with two rows
    OlsModel ols = fit_ols(X, T);
    CovEstimate cov{Eigen::MatrixXd::Identity(6, 6), 1};
    EarlyTrainingData data = build_early_training({Route{{1, 2}}}, X, T, inst, ols, cov);
    REQUIRE(data.labels[1] == std::vector<int>{0, 0});  // a(c1) = 5 or 35, e = 2
    REQUIRE(data.labels[2] == std::vector<int>{1, 0});  // a(c2) = 9 or 69, e = 30
    REQUIRE(data.W[2].rows() == 2);
    REQUIRE(data.W[2].cols() == 6);

    EarlyArrivalModel model = fit_early_arrival(data, 0.01, 20);
    // two rows is under the min, so both customers use frequencies
    REQUIRE(!model.at(1).use_logit);
    REQUIRE(model.at(1).freq == Catch::Approx((0.0 + 1.0) / 4.0));
    REQUIRE(model.at(2).freq == Catch::Approx((1.0 + 1.0) / 4.0));
}

TEST_CASE("enough two-class rows upgrade the customer to a logit") {
    Instance inst = tiny_instance();
    const ArcIndex ix = inst.arc_index();
    const int periods = 30;
    Eigen::MatrixXd X(periods, 1);
    X.setOnes();
    Eigen::MatrixXd T(periods, 6);
    std::mt19937_64 rng = make_rng(33);
    std::uniform_real_distribution<double> u(0.0, 40.0);
    for (Eigen::Index k = 0; k < periods; ++k) {
        const double bump = u(rng);
        for (Eigen::Index a = 0; a < 6; ++a) {
            auto [i, j] = ix.arc(static_cast<std::size_t>(a));
            T(k, a) = inst.nominal(i, j) + bump;
        }
    }
    OlsModel ols = fit_ols(X, T);
    CovEstimate cov{Eigen::MatrixXd::Identity(6, 6), 1};
    EarlyTrainingData data = build_early_training({Route{{1, 2}}}, X, T, inst, ols, cov);
    EarlyArrivalModel model = fit_early_arrival(data, 0.01, 20);
    REQUIRE(model.at(2).use_logit);   // arrivals straddle e = 30
    REQUIRE(!model.at(1).use_logit);  // always late for e = 2, one class
}

TEST_CASE("training set counting over routes and periods") {
    Instance inst = tiny_instance();
    const ArcIndex ix = inst.arc_index();
    Eigen::MatrixXd X(2, 1);
    X << 1.0, 1.0;
    Eigen::MatrixXd T(2, 6);
    for (Eigen::Index a = 0; a < 6; ++a) {
        auto [i, j] = ix.arc(static_cast<std::size_t>(a));
        T(0, a) = inst.nominal(i, j) + 1.0;
        T(1, a) = inst.nominal(i, j) + 2.0;
    }
    OlsModel ols = fit_ols(X, T);
    CovEstimate cov{Eigen::MatrixXd::Identity(6, 6), 1};
    EarlyArrivalModel early = constant_model(inst, 0.0);
    std::vector<Route> pool = {Route{{1, 2}}, Route{{2, 1}}, Route{{1}}};
    // a generous zero cap keeps the subsample out of the count
    PenaltyTrainingSet set = build_training_set(pool, X, T, inst, PenaltyFn::quadratic(), ols,
                                                cov, early, 7, 100.0);
    // route lengths 2 + 2 + 1 over 2 periods
    REQUIRE(set.Y.rows() == 10);
    REQUIRE(set.Y.cols() == fpf_dim(1));
    REQUIRE(set.provenance.find("3 routes") != std::string::npos);
}

TEST_CASE("on-time pools keep their all-zero targets") {
    Instance inst = tiny_instance();
    inst.due = {100.0, 20.0, 40.0};  // open the windows so nominal arrivals are on time
    inst.validate();
    Eigen::MatrixXd X(2, 1);
    X << 1.0, 1.0;
    const ArcIndex ix = inst.arc_index();
    Eigen::MatrixXd T(2, 6);
    for (Eigen::Index a = 0; a < 6; ++a) {
        auto [i, j] = ix.arc(static_cast<std::size_t>(a));
        T(0, a) = inst.nominal(i, j);
        T(1, a) = inst.nominal(i, j);
    }
    OlsModel ols = fit_ols(X, T);
    CovEstimate cov{Eigen::MatrixXd::Identity(6, 6), 1};
    PenaltyTrainingSet set = build_training_set({Route{{1, 2}}}, X, T, inst,
                                                PenaltyFn::quadratic(), ols, cov,
                                                constant_model(inst, 0.0), 7);
    REQUIRE(set.Y.rows() == 4);
    REQUIRE((set.pi.array() == 0.0).all());
}

TEST_CASE("a single late visit yields the squared lateness target") {
    Instance inst = tiny_instance();
    Eigen::MatrixXd X(2, 1);
    X << 1.0, 1.0;
    const ArcIndex ix = inst.arc_index();
    // c1 arrival = 5 + 1 = 6 vs due 4: lateness 2, target 4
    Eigen::MatrixXd T(2, 6);
    for (Eigen::Index a = 0; a < 6; ++a) {
        auto [i, j] = ix.arc(static_cast<std::size_t>(a));
        T(0, a) = inst.nominal(i, j) + (i == 0 && j == 1 ? 1.0 : 0.0);
        T(1, a) = inst.nominal(i, j) + (i == 0 && j == 1 ? 1.0 : 0.0);
    }
    OlsModel ols = fit_ols(X, T);
    CovEstimate cov{Eigen::MatrixXd::Identity(6, 6), 1};
    PenaltyTrainingSet set = build_training_set({Route{{1}}}, X, T, inst,
                                                PenaltyFn::quadratic(), ols, cov,
                                                constant_model(inst, 0.0), 7);
    REQUIRE(set.pi.size() == 2);
    REQUIRE(set.pi(0) == Catch::Approx(4.0).margin(1e-9));
}

TEST_CASE("zero-target subsampling caps the on-time rows") {
    Instance inst = random_toy_instance(304, {.n_customers = 6});
    const ArcIndex ix = inst.arc_index();
    const int periods = 20;
    std::mt19937_64 rng = make_rng(34);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd X(periods, 2);
    Eigen::MatrixXd T(periods, static_cast<Eigen::Index>(ix.arc_count()));
    for (Eigen::Index k = 0; k < periods; ++k) {
        X(k, 0) = 1.0;
        X(k, 1) = u(rng);
        for (Eigen::Index a = 0; a < T.cols(); ++a) {
            auto [i, j] = ix.arc(static_cast<std::size_t>(a));
            // rare large delays so a handful of rows go late
            T(k, a) = inst.nominal(i, j) + (u(rng) < 0.02 ? 300.0 : 0.5 * u(rng));
        }
    }
    OlsModel ols = fit_ols(X, T);
    CovEstimate cov = estimate_cov(X, T, ols);
    std::vector<Route> pool;
    for (int t = 0; t < 6; ++t) pool.push_back(random_route(inst, rng));
    PenaltyTrainingSet set = build_training_set(pool, X, T, inst, PenaltyFn::quadratic(), ols,
                                                cov, constant_model(inst, 0.0), 11);
    std::size_t n_pos = 0, n_zero = 0;
    for (Eigen::Index r = 0; r < set.pi.size(); ++r)
        (set.pi(r) > 0.0 ? n_pos : n_zero)++;
    REQUIRE(n_pos > 0);
    REQUIRE(n_zero <= 3 * n_pos);

    PenaltyTrainingSet again = build_training_set(pool, X, T, inst, PenaltyFn::quadratic(), ols,
                                                  cov, constant_model(inst, 0.0), 11);
    REQUIRE(again.Y == set.Y);
    REQUIRE(again.pi == set.pi);
}

TEST_CASE("free-flow features bound their predicted analogues") {
    std::mt19937_64 rng = make_rng(35);
    Instance inst = random_toy_instance(305, {.n_customers = 5});
    const ArcIndex ix = inst.arc_index();
    const int periods = 8;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd X(periods, 2);
    Eigen::MatrixXd T(periods, static_cast<Eigen::Index>(ix.arc_count()));
    for (Eigen::Index k = 0; k < periods; ++k) {
        X(k, 0) = 1.0;
        X(k, 1) = u(rng);
        for (Eigen::Index a = 0; a < T.cols(); ++a) {
            auto [i, j] = ix.arc(static_cast<std::size_t>(a));
            T(k, a) = inst.nominal(i, j) + 3.0 * u(rng);
        }
    }
    OlsModel ols = fit_ols(X, T);
    CovEstimate cov = estimate_cov(X, T, ols);
    PenaltyTrainingSet set = build_training_set({random_route(inst, rng), random_route(inst, rng)},
                                                X, T, inst, PenaltyFn::quadratic(), ols, cov,
                                                constant_model(inst, 0.5), 3);
    const int p = 2;
    for (Eigen::Index r = 0; r < set.Y.rows(); ++r)
        for (int s = 0; s < 4; ++s)
            REQUIRE(set.Y(r, p + 6 + s) <= set.Y(r, p + 11 + s) + 1e-9);
}

TEST_CASE("penalty training set serializes with named headers") {
    Instance inst = tiny_instance();
    Eigen::MatrixXd X(2, 1);
    X << 1.0, 1.0;
    const ArcIndex ix = inst.arc_index();
    Eigen::MatrixXd T(2, 6);
    for (Eigen::Index a = 0; a < 6; ++a) {
        auto [i, j] = ix.arc(static_cast<std::size_t>(a));
        T(0, a) = inst.nominal(i, j);
        T(1, a) = inst.nominal(i, j) + 1.0;
    }
    OlsModel ols = fit_ols(X, T);
    CovEstimate cov{Eigen::MatrixXd::Identity(6, 6), 1};
    PenaltyTrainingSet set = build_training_set({Route{{1, 2}}}, X, T, inst,
                                                PenaltyFn::quadratic(), ols, cov,
                                                constant_model(inst, 0.0), 5);
    const std::string path =
        (std::filesystem::temp_directory_path() / "penalty_training.csv").string();
    write_penalty_csv(set, path, 1);
    std::ifstream in(path);
    std::string header;
    REQUIRE(std::getline(in, header));
    REQUIRE(header.find("service_risk,target") != std::string::npos);
    std::string first;
    REQUIRE(std::getline(in, first));
    REQUIRE(std::count(first.begin(), first.end(), ',') == fpf_dim(1));
    std::filesystem::remove(path);
}
