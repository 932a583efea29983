// Command-line front end: pool diagnostics, closed-form error budgets,
// config-driven Monte Carlo runs and the named study presets.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ralp/config.hpp"
#include "ralp/harness.hpp"
#include "ralp/preamble_pool.hpp"
#include "ralp/theory.hpp"

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Default output directory: --output-dir beats RALP_OUTPUT_DIR beats cwd.
fs::path output_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("RALP_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

struct PoolArgs {
    int n = 13;
    int l2_size = 0;  // 0 -> full pool n*(n-1)
    std::string gram_csv;
};

int run_pool(const PoolArgs& args) {
    const int l2 = args.l2_size > 0 ? args.l2_size : args.n * (args.n - 1);
    const ralp::PreamblePool pool = ralp::PreamblePool::build(args.n, l2);

    const Eigen::MatrixXcd l1 = pool.l1_block();
    const double ortho_dev =
        (l1.adjoint() * l1 - Eigen::MatrixXcd::Identity(pool.n(), pool.n())).cwiseAbs().maxCoeff();
    const Eigen::MatrixXd cross = (l1.adjoint() * pool.l2_block()).cwiseAbs();
    const double coherence = 1.0 / std::sqrt(static_cast<double>(pool.n()));
    const double cross_dev = (cross.array() - coherence).abs().maxCoeff();

    std::cout << "n=" << pool.n() << " l1_size=" << pool.l1_size()
              << " l2_size=" << pool.l2_size() << " pool_size=" << pool.size() << "\n"
              << "l1_orthonormality_deviation=" << fmt(ortho_dev) << "\n"
              << "l1_l2_coherence=" << fmt(coherence) << " max_deviation=" << fmt(cross_dev)
              << "\n";
    if (!args.gram_csv.empty()) {
        std::ofstream out(args.gram_csv);
        if (!out) throw std::runtime_error("cannot open '" + args.gram_csv + "' for writing");
        pool.write_gram_csv(out);
        std::cout << "wrote " << args.gram_csv << "\n";
    }
    return 0;
}

struct TheoryArgs {
    int n = 13;
    int m = 10;
    int k2 = 0;
    int multiplicity = 2;
    double p1_db = 12.0;
    double p2_db = 6.0;
    double n0 = 1.0;
    double eps = 1e-2;
    double eps_c = 1e-3;
    std::string sweep;  // empty, k2, m, p1_db or p2_db
    std::vector<double> values;
    std::string output;
};

int run_theory(const TheoryArgs& args) {
    if (args.sweep.empty() != args.values.empty())
        throw ralp::ConfigError("theory: --sweep and --values must be given together");

    std::ostringstream csv;
    csv << "sweep_var,value,i2,tau_activity,tau_collision,p_md,p_fa,"
           "p_single_as_collision,p_collision_as_single,kl\n";

    const std::string var = args.sweep.empty() ? "none" : args.sweep;
    std::vector<double> values = args.values;
    if (values.empty()) values.push_back(0.0);

    for (double v : values) {
        int m = args.m;
        int k2 = args.k2;
        double p1_db = args.p1_db;
        double p2_db = args.p2_db;
        if (var == "k2")
            k2 = static_cast<int>(v);
        else if (var == "m")
            m = static_cast<int>(v);
        else if (var == "p1_db")
            p1_db = v;
        else if (var == "p2_db")
            p2_db = v;
        else if (var != "none")
            throw ralp::ConfigError("theory: unknown sweep variable '" + var + "'");

        const double p1 = std::pow(10.0, p1_db / 10.0);
        const double p2 = std::pow(10.0, p2_db / 10.0);
        const double i2 = ralp::interference_power(k2, p2, args.n, args.n0);
        const double tau_a = ralp::calibrate_activity_threshold(m, args.eps, p1, i2);
        const double tau_c = ralp::calibrate_collision_threshold(m, args.eps_c, p1, i2);
        ralp::TheoryParams tp;
        tp.m = m;
        tp.p1 = p1;
        tp.p2 = p2;
        tp.n0 = args.n0;
        tp.k2 = k2;
        tp.collision_multiplicity = args.multiplicity;
        const ralp::ErrorBudget b = ralp::error_budget(tau_a, tau_c, tp, args.n);
        csv << var << ',' << fmt(v) << ',' << fmt(i2) << ',' << fmt(tau_a) << ',' << fmt(tau_c)
            << ',' << fmt(b.missed_detection) << ',' << fmt(b.false_alarm) << ','
            << fmt(b.single_as_collision) << ',' << fmt(b.collision_as_single) << ','
            << fmt(ralp::kl_divergence(p1, i2)) << '\n';
    }

    if (args.output.empty() || args.output == "-") {
        std::cout << csv.str();
    } else {
        std::ofstream out(args.output);
        if (!out) throw std::runtime_error("cannot open '" + args.output + "' for writing");
        out << csv.str();
        std::cout << "wrote " << args.output << "\n";
    }
    return 0;
}

void run_one_experiment(const ralp::ExperimentConfig& cfg, const fs::path& csv_path) {
    std::cerr << "running " << (cfg.label.empty() ? csv_path.stem().string() : cfg.label) << ": "
              << std::max<std::size_t>(1, cfg.sweep_values.size()) << " point(s) x " << cfg.trials
              << " trials\n";
    const ralp::ErrorStats stats = ralp::run_experiment(cfg);

    if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot open '" + csv_path.string() + "' for writing");
    ralp::write_csv(stats, cfg, csv);

    fs::path manifest_path = csv_path;
    manifest_path.replace_extension(".json");
    std::ofstream manifest(manifest_path);
    if (!manifest)
        throw std::runtime_error("cannot open '" + manifest_path.string() + "' for writing");
    ralp::write_manifest(stats, cfg, csv_path.filename().string(), manifest);

    std::cout << "wrote " << csv_path.string() << "\n"
              << "wrote " << manifest_path.string() << "\n";
}

struct SimulateArgs {
    std::string config_path;
    std::string output;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<long> trials;
    std::optional<int> threads;
};

int run_simulate(const SimulateArgs& args) {
    ralp::ExperimentConfig cfg = ralp::load_experiment_config(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    if (args.trials) cfg.trials = *args.trials;
    if (args.threads) cfg.threads = *args.threads;

    fs::path csv_path;
    if (!args.output.empty()) {
        csv_path = args.output;
    } else {
        const std::string stem =
            !cfg.label.empty() ? cfg.label : fs::path(args.config_path).stem().string();
        csv_path = output_dir(args.out_dir) / (stem + ".csv");
    }
    run_one_experiment(cfg, csv_path);
    return 0;
}

struct SweepArgs {
    std::string preset;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<long> trials;
    std::optional<int> threads;
};

int run_sweep(const SweepArgs& args) {
    const auto runs = ralp::figure_preset(args.preset);
    const fs::path dir = output_dir(args.out_dir);
    for (const auto& run : runs) {
        ralp::ExperimentConfig cfg = run.config;
        if (args.seed) cfg.seed = *args.seed;
        if (args.trials) cfg.trials = *args.trials;
        if (args.threads) cfg.threads = *args.threads;
        run_one_experiment(cfg, dir / (run.label + ".csv"));
    }
    return 0;
}

void report_error(const std::string& kind, const std::string& what) {
    std::cerr << nlohmann::json{{"error", what}, {"kind", kind}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"layered-preamble random access: pools, closed forms and Monte Carlo runs"};
    app.require_subcommand(1);

    PoolArgs pool_args;
    auto* pool_cmd = app.add_subcommand("pool", "build a preamble pool and report its geometry");
    pool_cmd->add_option("--n", pool_args.n, "sequence length (prime >= 5)")->required();
    pool_cmd->add_option("--l2-size", pool_args.l2_size,
                         "layer-2 pool size (default: the full n*(n-1))");
    pool_cmd->add_option("--gram-csv", pool_args.gram_csv, "write |Gram| matrix CSV here");

    TheoryArgs theory_args;
    auto* theory_cmd = app.add_subcommand("theory", "closed-form thresholds and error budget");
    theory_cmd->add_option("--n", theory_args.n, "sequence length");
    theory_cmd->add_option("--m", theory_args.m, "antennas");
    theory_cmd->add_option("--k2", theory_args.k2, "active layer-2 devices");
    theory_cmd->add_option("--multiplicity", theory_args.multiplicity,
                           "devices assumed in a collision (>= 2)");
    theory_cmd->add_option("--p1-db", theory_args.p1_db, "layer-1 power in dB");
    theory_cmd->add_option("--p2-db", theory_args.p2_db, "layer-2 power in dB");
    theory_cmd->add_option("--n0", theory_args.n0, "noise variance (linear)");
    theory_cmd->add_option("--eps", theory_args.eps, "target miss level");
    theory_cmd->add_option("--eps-c", theory_args.eps_c, "single-to-collision level");
    theory_cmd->add_option("--sweep", theory_args.sweep, "sweep variable: k2, m, p1_db, p2_db");
    theory_cmd->add_option("--values", theory_args.values, "sweep values")->delimiter(',');
    theory_cmd->add_option("-o,--output", theory_args.output, "output CSV path ('-' = stdout)");

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "run the Monte Carlo harness from a config file");
    sim_cmd->add_option("--config", sim_args.config_path, "experiment config file")
        ->required();
    sim_cmd->add_option("-o,--output", sim_args.output, "output CSV path");
    sim_cmd->add_option("--output-dir", sim_args.out_dir,
                        "output directory (default: $RALP_OUTPUT_DIR or cwd)");
    sim_cmd->add_option("--seed", sim_args.seed, "override the base seed");
    sim_cmd->add_option("--trials", sim_args.trials, "override the trial count");
    sim_cmd->add_option("--threads", sim_args.threads, "override the worker count");

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a named study preset");
    sweep_cmd->add_option("preset", sweep_args.preset, "preset name (fig4 ... fig10)")->required();
    sweep_cmd->add_option("--output-dir", sweep_args.out_dir,
                          "output directory (default: $RALP_OUTPUT_DIR or cwd)");
    sweep_cmd->add_option("--seed", sweep_args.seed, "override the base seed");
    sweep_cmd->add_option("--trials", sweep_args.trials, "override the trial count per arm");
    sweep_cmd->add_option("--threads", sweep_args.threads, "override the worker count");

    try {
        app.parse(argc, argv);
        if (pool_cmd->parsed()) return run_pool(pool_args);
        if (theory_cmd->parsed()) return run_theory(theory_args);
        if (sim_cmd->parsed()) return run_simulate(sim_args);
        if (sweep_cmd->parsed()) return run_sweep(sweep_args);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage", e.what());
        return 1;
    } catch (const ralp::ConfigError& e) {
        report_error("config", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        report_error("config", e.what());
        return 1;
    } catch (const std::exception& e) {
        report_error("runtime", e.what());
        return 2;
    }
}
