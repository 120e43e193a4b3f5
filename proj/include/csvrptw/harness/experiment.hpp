#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "csvrptw/core/solomon.hpp"
#include "csvrptw/harness/evaluate.hpp"
#include "csvrptw/methods/prescribe.hpp"

namespace csvrptw {

// One declarative document drives a whole grid: every (instance, seed)
// pair becomes an independent cell running every listed method.
struct ExperimentConfig {
    std::vector<std::string> instances;  // file stems under data_dir, e.g. R101
    int n_customers = 15;
    ModelKind model = ModelKind::linear;
    std::vector<std::uint64_t> seeds;
    int n = 50;   // training periods
    int p = 2;    // features, intercept included
    int n_x = 10;
    int n_t = 50;
    std::vector<Method> methods;
    int csaa_count = 50;
    int knn_k = 0;
    double time_limit = 0.0;
    std::size_t node_limit = 0;
    std::size_t max_labels = 0;  // 0 keeps the pricing default
    int threads = 0;             // 0 = hardware concurrency
    std::string data_dir;
    std::string out_dir;
    MlpHyper mlp;

    void validate() const {
        if (instances.empty()) throw ConfigError("experiment needs at least one instance");
        if (seeds.empty()) throw ConfigError("experiment needs at least one seed");
        if (methods.empty()) throw ConfigError("experiment needs at least one method");
        if (n_customers < 1 || n < 2 || p < 1 || n_x < 1 || n_t < 1)
            throw ConfigError("experiment sizes must be positive");
        if (n <= p) throw ConfigError("need n > p training periods");
        if (csaa_count < 1) throw ConfigError("csaa_count must be positive");
        if (data_dir.empty()) throw ConfigError("experiment needs a data_dir");
    }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(v);
    while (std::getline(in, cur, ',')) {
        const std::string t = trim(cur);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

}  // namespace detail

// Line-oriented `key = value` document; '#' starts a comment, lists are
// comma separated. Unknown keys are errors so typos cannot silently fall
// back to defaults.
inline ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        try {
            if (key == "instances") cfg.instances = detail::split_list(val);
            else if (key == "n_customers") cfg.n_customers = std::stoi(val);
            else if (key == "model") cfg.model = model_kind_from_name(val);
            else if (key == "seeds") {
                cfg.seeds.clear();
                for (const std::string& s : detail::split_list(val))
                    cfg.seeds.push_back(std::stoull(s));
            } else if (key == "n") cfg.n = std::stoi(val);
            else if (key == "p") cfg.p = std::stoi(val);
            else if (key == "n_x") cfg.n_x = std::stoi(val);
            else if (key == "n_t") cfg.n_t = std::stoi(val);
            else if (key == "methods") {
                cfg.methods.clear();
                for (const std::string& s : detail::split_list(val))
                    cfg.methods.push_back(method_from_name(s));
            } else if (key == "csaa_count") cfg.csaa_count = std::stoi(val);
            else if (key == "knn_k") cfg.knn_k = std::stoi(val);
            else if (key == "time_limit") cfg.time_limit = std::stod(val);
            else if (key == "node_limit") cfg.node_limit = std::stoull(val);
            else if (key == "max_labels") cfg.max_labels = std::stoull(val);
            else if (key == "threads") cfg.threads = std::stoi(val);
            else if (key == "data_dir") cfg.data_dir = val;
            else if (key == "out_dir") cfg.out_dir = val;
            else if (key == "mlp_epochs") cfg.mlp.epochs = std::stoi(val);
            else if (key == "mlp_lr") cfg.mlp.lr = std::stod(val);
            else if (key == "mlp_l2") cfg.mlp.l2 = std::stod(val);
            else if (key == "mlp_hidden") {
                cfg.mlp.hidden.clear();
                for (const std::string& s : detail::split_list(val))
                    cfg.mlp.hidden.push_back(std::stoi(s));
            } else throw ConfigError("config line " + std::to_string(lineno) +
                                     ": unknown key '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("config line " + std::to_string(lineno) + ": bad value for '" +
                              key + "'");
        }
    }
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_experiment_config(in);
}

struct ExperimentResult {
    std::vector<ResultRow> rows;  // config order: instance x seed x method roster
    std::string sidecar_json;     // provenance incl. wall times and per-context solves
};

namespace detail {

// D-avg and SAA ignore the observed context, so one solve serves every x.
inline bool method_is_contextual(Method m) {
    return m != Method::d_avg && m != Method::saa;
}

struct CellOutput {
    std::vector<ResultRow> rows;
    std::vector<std::string> row_json;
};

inline CellOutput run_cell(const ExperimentConfig& cfg, const std::string& stem,
                           std::uint64_t seed) {
    const Instance inst =
        make_instance(parse_solomon_file(cfg.data_dir + "/" + stem + ".txt"), cfg.n_customers);
    const std::uint64_t base = derive_seed(seed, stem);
    const GenerativeModel gm =
        make_generative_model(inst, cfg.model, cfg.p, derive_seed(base, "genmodel"));
    const Dataset data = make_dataset(gm, inst, cfg.n, cfg.p, derive_seed(base, "dataset"));
    const TestSet test = make_testset(gm, inst, cfg.n_x, cfg.n_t, derive_seed(base, "testset"));

    MethodContext ctx;
    ctx.csaa_count = cfg.csaa_count;
    ctx.knn_k = cfg.knn_k;
    ctx.mlp = cfg.mlp;
    ctx.limits.time_limit = cfg.time_limit;
    ctx.limits.node_limit = cfg.node_limit;
    if (cfg.max_labels > 0) ctx.limits.pricing.max_labels = cfg.max_labels;

    // Full runs first when present so every other method can be gapped.
    std::vector<Method> order = cfg.methods;
    std::stable_partition(order.begin(), order.end(),
                          [](Method m) { return m == Method::full; });

    double full_r_hat = std::numeric_limits<double>::quiet_NaN();
    double full_gap = 0.0;
    CellOutput out;
    std::vector<ResultRow> rows_by_method(cfg.methods.size());
    std::vector<std::string> json_by_method(cfg.methods.size());

    for (Method m : order) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<Prescription> per_x;
        per_x.reserve(test.features.size());
        for (std::size_t ix = 0; ix < test.features.size(); ++ix) {
            MethodContext run_ctx = ctx;
            run_ctx.seed = derive_seed(base, "x" + std::to_string(ix));
            run_ctx.test_scenarios = &test.times[ix];
            if (!detail::method_is_contextual(m) && ix > 0) {
                Prescription copy = per_x.front();
                copy.x = test.features[ix];
                per_x.push_back(std::move(copy));
                continue;
            }
            per_x.push_back(prescribe(m, data, test.features[ix], inst, run_ctx));
        }
        const TestCostBreakdown cost = evaluate_test_cost(inst, per_x, test, ctx.pen);

        ResultRow row;
        row.instance = inst.name;
        row.model = model_kind_name(cfg.model);
        row.seed = seed;
        row.method = method_name(m);
        row.r_hat = cost.r_hat;
        row.c_hat = cost.c_hat;
        row.q_hat = cost.q_hat;
        for (const Prescription& p : per_x)
            row.solve_gap = std::max(row.solve_gap, std::isfinite(p.report.gap) ? p.report.gap
                                                                                : 1.0);
        if (m == Method::full) {
            full_r_hat = cost.r_hat;
            full_gap = row.solve_gap;
            row.rho = 0.0;
        } else if (std::isfinite(full_r_hat)) {
            row.rho = full_info_gap_percent(cost.r_hat, full_r_hat);
        }
        row.full_solve_gap = full_gap;
        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        std::string js = row.to_json();
        js.pop_back();  // reopen the object for the per-context solves
        js += ",\"contexts\":[";
        for (std::size_t ix = 0; ix < per_x.size(); ++ix) {
            if (ix) js += ",";
            js += "{\"objective\":" + num17(per_x[ix].objective);
            js += ",\"status\":\"" + std::string(to_string(per_x[ix].report.status)) + "\"";
            js += ",\"nodes\":" + std::to_string(per_x[ix].report.nodes);
            js += ",\"wall_seconds\":" + num17(per_x[ix].report.wall_seconds) + "}";
        }
        js += "]}";

        const auto slot = static_cast<std::size_t>(
            std::find(cfg.methods.begin(), cfg.methods.end(), m) - cfg.methods.begin());
        rows_by_method[slot] = std::move(row);
        json_by_method[slot] = std::move(js);
    }

    out.rows = std::move(rows_by_method);
    out.row_json = std::move(json_by_method);
    return out;
}

}  // namespace detail

// Grid driver: cells are (instance, seed) pairs, computed by a worker pool
// and emitted in configuration order, so the rendered CSV is independent
// of scheduling.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    struct Cell {
        std::string stem;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (const std::string& stem : cfg.instances)
        for (std::uint64_t s : cfg.seeds) cells.push_back({stem, s});

    std::vector<detail::CellOutput> outputs(cells.size());
    std::vector<std::exception_ptr> errors(cells.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= cells.size()) return;
            try {
                outputs[c] = detail::run_cell(cfg, cells[c].stem, cells[c].seed);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_threads =
        std::min<std::size_t>(cells.size(), cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                                            : hw);
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);

    ExperimentResult res;
    std::string sidecar = "{\"n_customers\":" + std::to_string(cfg.n_customers);
    sidecar += ",\"model\":\"" + model_kind_name(cfg.model) + "\"";
    sidecar += ",\"n\":" + std::to_string(cfg.n) + ",\"p\":" + std::to_string(cfg.p);
    sidecar += ",\"n_x\":" + std::to_string(cfg.n_x) + ",\"n_t\":" + std::to_string(cfg.n_t);
    sidecar += ",\"csaa_count\":" + std::to_string(cfg.csaa_count);
    sidecar += ",\"time_limit\":" + detail::num17(cfg.time_limit);
    sidecar += ",\"instances\":[";
    for (std::size_t k = 0; k < cfg.instances.size(); ++k)
        sidecar += (k ? ",\"" : "\"") + cfg.instances[k] + "\"";
    sidecar += "],\"seeds\":[";
    for (std::size_t k = 0; k < cfg.seeds.size(); ++k)
        sidecar += (k ? "," : "") + std::to_string(cfg.seeds[k]);
    sidecar += "],\"methods\":[";
    for (std::size_t k = 0; k < cfg.methods.size(); ++k)
        sidecar += (k ? ",\"" : "\"") + std::string(method_name(cfg.methods[k])) + "\"";
    sidecar += "],\"rows\":[";
    bool first = true;
    for (const detail::CellOutput& cell : outputs) {
        for (std::size_t k = 0; k < cell.rows.size(); ++k) {
            res.rows.push_back(cell.rows[k]);
            if (!first) sidecar += ",";
            sidecar += cell.row_json[k];
            first = false;
        }
    }
    sidecar += "]}";
    res.sidecar_json = std::move(sidecar);
    return res;
}

// results.csv is the byte-stable artifact; results.json carries timings.
inline void write_experiment(const ExperimentResult& res, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream csv(out_dir + "/results.csv", std::ios::binary);
        if (!csv) throw ConfigError("cannot write " + out_dir + "/results.csv");
        csv << render_rows_csv(res.rows);
    }
    std::ofstream js(out_dir + "/results.json", std::ios::binary);
    if (!js) throw ConfigError("cannot write " + out_dir + "/results.json");
    js << res.sidecar_json << "\n";
}

}  // namespace csvrptw
