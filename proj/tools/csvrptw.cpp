// Command-line front end: dataset generation, single-method solves, grid
// experiments, brute-force cross-checks, the small illustrative demo, and
// result-table aggregation.
//
// Exit codes: 0 success, 2 configuration error, 3 a solver hit its limit
// with an optimality gap above 1%.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "csvrptw/harness/demo.hpp"
#include "csvrptw/harness/experiment.hpp"
#include "csvrptw/harness/oracle.hpp"
#include "csvrptw/harness/report.hpp"

namespace {

using namespace csvrptw;

constexpr double kGapThreshold = 0.01;  // limit verdicts below this still exit 0

const char* kUsage = R"(usage: csvrptw <command> [flags]

commands:
  gen         sample a training dataset and write X.csv / T.csv / manifest.json
  solve       run one prescriptive method on one instance and print its result row
  experiment  run a full grid from a config file
  oracle      cross-check the solver against brute-force enumeration
  demo        run the two-context illustrative example
  report      aggregate result rows into a result-table CSV

common flags:
  --instance NAME      Solomon file stem, e.g. R101 (default R101)
  --n-customers N      truncation size (default 10)
  --model KIND         linear | exp | sigmoid (default linear)
  --method NAME        method id, e.g. d-avg, saa, csaa, full (default csaa)
  --seed S             base seed (default 1)
  --time-limit SEC     per-solve wall clock budget (default unlimited)
  --out PATH           output file or directory (default stdout / ./out)
  --data-dir DIR       instance file directory (default built-in corpus)
  --config FILE        experiment config document (experiment only)
  --n / --p / --n-x / --n-t   data sizes (defaults 50 / 2 / 10 / 50)
)";

struct Args {
    std::string command;
    std::map<std::string, std::string> flags;

    bool has(const std::string& k) const { return flags.count(k) > 0; }
    std::string get(const std::string& k, const std::string& fallback) const {
        auto it = flags.find(k);
        return it == flags.end() ? fallback : it->second;
    }
    int get_int(const std::string& k, int fallback) const {
        auto it = flags.find(k);
        if (it == flags.end()) return fallback;
        try {
            return std::stoi(it->second);
        } catch (const std::exception&) {
            throw ConfigError("flag --" + k + " needs an integer, got '" + it->second + "'");
        }
    }
    std::uint64_t get_seed() const {
        auto it = flags.find("seed");
        if (it == flags.end()) return 1;
        try {
            return std::stoull(it->second);
        } catch (const std::exception&) {
            throw ConfigError("flag --seed needs an integer, got '" + it->second + "'");
        }
    }
    double get_double(const std::string& k, double fallback) const {
        auto it = flags.find(k);
        if (it == flags.end()) return fallback;
        try {
            return std::stod(it->second);
        } catch (const std::exception&) {
            throw ConfigError("flag --" + k + " needs a number, got '" + it->second + "'");
        }
    }
};

Args parse_args(int argc, char** argv) {
    Args a;
    if (argc < 2) throw ConfigError("missing command");
    a.command = argv[1];
    for (int i = 2; i < argc; ++i) {
        std::string flag = argv[i];
        if (flag.rfind("--", 0) != 0) throw ConfigError("expected a --flag, got '" + flag + "'");
        flag = flag.substr(2);
        if (i + 1 >= argc) throw ConfigError("flag --" + flag + " needs a value");
        a.flags[flag] = argv[++i];
    }
    return a;
}

std::string default_data_dir() {
#ifdef CSVRPTW_DATA_DIR
    return CSVRPTW_DATA_DIR;
#else
    return "data/solomon";
#endif
}

Instance load_instance(const Args& a) {
    const std::string dir = a.get("data-dir", default_data_dir());
    const std::string stem = a.get("instance", "R101");
    return make_instance(parse_solomon_file(dir + "/" + stem + ".txt"),
                         a.get_int("n-customers", 10));
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

int cmd_gen(const Args& a) {
    const Instance inst = load_instance(a);
    const ModelKind kind = model_kind_from_name(a.get("model", "linear"));
    const std::uint64_t seed = a.get_seed();
    const int p = a.get_int("p", 2);
    const GenerativeModel gm = make_generative_model(inst, kind, p, derive_seed(seed, "genmodel"));
    const Dataset data =
        make_dataset(gm, inst, a.get_int("n", 50), p, derive_seed(seed, "dataset"));
    const std::string out = a.get("out", "out/dataset");
    write_dataset(data, out, inst.name);
    std::cout << "wrote " << data.n() << " periods for " << inst.name << " to " << out << "\n";
    return 0;
}

// One (instance, seed, method) cell: prescribe per test context, evaluate,
// print the result row. Full is solved alongside automatically so the row
// carries a full-information gap.
int cmd_solve(const Args& a) {
    const Instance inst = load_instance(a);
    const Method method = method_from_name(a.get("method", "csaa"));

    ExperimentConfig cfg;
    cfg.instances = {a.get("instance", "R101")};
    cfg.n_customers = a.get_int("n-customers", 10);
    cfg.model = model_kind_from_name(a.get("model", "linear"));
    cfg.seeds = {a.get_seed()};
    cfg.n = a.get_int("n", 50);
    cfg.p = a.get_int("p", 2);
    cfg.n_x = a.get_int("n-x", 10);
    cfg.n_t = a.get_int("n-t", 50);
    cfg.methods = method == Method::full ? std::vector<Method>{Method::full}
                                         : std::vector<Method>{method, Method::full};
    cfg.time_limit = a.get_double("time-limit", 0.0);
    cfg.data_dir = a.get("data-dir", default_data_dir());
    cfg.threads = 1;
    (void)inst;

    const ExperimentResult res = run_experiment(cfg);
    const std::string text = render_rows_csv(res.rows);
    if (a.has("out")) {
        write_text(a.flags.at("out"), text);
    } else {
        std::cout << text;
    }
    for (const ResultRow& r : res.rows)
        if (r.solve_gap > kGapThreshold) return 3;
    return 0;
}

int cmd_experiment(const Args& a) {
    if (!a.has("config")) throw ConfigError("experiment needs --config FILE");
    ExperimentConfig cfg = load_experiment_config(a.flags.at("config"));
    if (cfg.data_dir.empty()) cfg.data_dir = a.get("data-dir", default_data_dir());
    if (a.has("out")) cfg.out_dir = a.flags.at("out");
    if (cfg.out_dir.empty()) cfg.out_dir = "out/experiment";
    if (a.has("time-limit")) cfg.time_limit = a.get_double("time-limit", 0.0);

    const ExperimentResult res = run_experiment(cfg);
    write_experiment(res, cfg.out_dir);
    write_text(cfg.out_dir + "/report.csv", aggregate_report_csv(res.rows));
    std::cout << "wrote " << res.rows.size() << " rows to " << cfg.out_dir << "\n";
    for (const ResultRow& r : res.rows)
        if (r.solve_gap > kGapThreshold) return 3;
    return 0;
}

// Brute-force enumeration against branch-and-price on the same objective.
int cmd_oracle(const Args& a) {
    const Instance inst = load_instance(a);
    const ModelKind kind = model_kind_from_name(a.get("model", "linear"));
    const std::uint64_t seed = a.get_seed();
    const int p = a.get_int("p", 2);
    const GenerativeModel gm = make_generative_model(inst, kind, p, derive_seed(seed, "genmodel"));
    const Dataset data =
        make_dataset(gm, inst, a.get_int("n", 10), p, derive_seed(seed, "dataset"));
    const Method method = method_from_name(a.get("method", "saa"));
    if (method == Method::p_nn || method_is_benchmark(method))
        throw ConfigError("oracle cross-checks the data-driven scenario methods only");

    MethodContext ctx;
    ctx.seed = derive_seed(seed, "methods");
    ctx.csaa_count = a.get_int("csaa-count", 10);
    ctx.limits.time_limit = a.get_double("time-limit", 0.0);
    const Eigen::VectorXd x_new = data.x.row(0).transpose();
    const SolveObjective obj = method_objective(method, inst, data, x_new, ctx);
    const OracleResult oracle = brute_force_scenario_optimum(inst, obj.scenarios(), ctx.pen);
    const Prescription p_solver = prescribe(method, data, x_new, inst, ctx);

    const bool agree = oracle.feasible && std::abs(oracle.value - p_solver.objective) <= 1e-6;
    std::ostringstream out;
    out.precision(17);
    out << "{\"instance\":\"" << inst.name << "\",\"method\":\"" << method_name(method)
        << "\",\"oracle\":" << (oracle.feasible ? std::to_string(oracle.value) : "null")
        << ",\"solver\":" << p_solver.objective << ",\"agree\":" << (agree ? "true" : "false")
        << "}\n";
    if (a.has("out")) {
        write_text(a.flags.at("out"), out.str());
    } else {
        std::cout << out.str();
    }
    return agree ? 0 : 1;
}

int cmd_demo(const Args& a) {
    DemoOptions opt;
    opt.time_limit = a.get_double("time-limit", 0.0);
    const DemoReport rep = run_illustrative_example(a.get_seed(), opt);
    const std::string text = rep.to_json() + "\n";
    if (a.has("out")) {
        write_text(a.flags.at("out"), text);
    } else {
        std::cout << text;
    }
    return 0;
}

int cmd_report(const Args& a) {
    std::string in_path = a.get("in", "out/experiment");
    if (std::filesystem::is_directory(in_path)) in_path += "/results.csv";
    std::ifstream in(in_path);
    if (!in) throw ConfigError("cannot open " + in_path);
    const std::vector<ResultRow> rows = parse_rows_csv(in);
    const std::string table = aggregate_report_csv(rows);
    if (a.has("out")) {
        write_text(a.flags.at("out"), table);
    } else {
        std::cout << table;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        const Args args = parse_args(argc, argv);
        if (args.command == "gen") return cmd_gen(args);
        if (args.command == "solve") return cmd_solve(args);
        if (args.command == "experiment") return cmd_experiment(args);
        if (args.command == "oracle") return cmd_oracle(args);
        if (args.command == "demo") return cmd_demo(args);
        if (args.command == "report") return cmd_report(args);
        if (args.command == "help" || args.command == "--help" || args.command == "-h") {
            std::cout << kUsage;
            return 0;
        }
        throw ConfigError("unknown command '" + args.command + "'");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n" << kUsage;
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const LimitError& e) {
        std::cerr << "solver limit: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
