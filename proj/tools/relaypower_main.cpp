// Command-line front end: Monte Carlo budget sweeps, single-trial
// inspection of the allocator, and the self-validation suite.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "relaypower/relaypower.hpp"

namespace {

using namespace relaypower;

constexpr int exit_ok = 0;
constexpr int exit_runtime = 1;
constexpr int exit_config = 2;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<long> trials;
    std::optional<std::string> methods;
};

/// Layered configuration: file (or defaults), then --set overrides, then
/// dedicated flags.
nlohmann::json resolve_config_json(const CommonArgs& args) {
    nlohmann::json j;
    if (!args.config_path.empty()) {
        j = load_json_file(args.config_path);
        require(j.is_object(), "config file must hold a JSON object");
    } else {
        j = nlohmann::json::object();
    }
    for (const std::string& o : args.overrides) apply_override(j, o);
    if (args.seed) j["seed"] = *args.seed;
    if (args.trials) j["trials"] = *args.trials;
    if (args.methods) {
        nlohmann::json names = nlohmann::json::array();
        std::string cur;
        for (char ch : *args.methods + ",") {
            if (ch == ',') {
                if (!cur.empty()) names.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        j["methods"] = names;
    }
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

int cmd_sweep(const CommonArgs& args, const std::string& out_path, int workers) {
    nlohmann::json cfg_json;
    ScenarioConfig cfg = default_config(TargetKind::scalar);
    try {
        cfg_json = resolve_config_json(args);
        cfg = config_from_json(cfg_json);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }
    cfg_json = config_to_json(cfg);  // canonical form with defaults filled in

    RunManifest manifest;
    manifest.config = cfg_json;
    manifest.workers = workers;
    manifest.started_utc = utc_timestamp(std::chrono::system_clock::now());

    const SweepResult sweep = run_sweep(cfg, workers);
    const std::string csv = to_csv(sweep.rows);
    write_file(out_path, csv);

    manifest.finished_utc = utc_timestamp(std::chrono::system_clock::now());
    manifest.outputs = {out_path};
    const std::string manifest_path = out_path + ".manifest.json";
    write_file(manifest_path, manifest_json(manifest).dump(2) + "\n");

    std::cout << "wrote " << out_path << " (" << sweep.rows.size()
              << " rows) and " << manifest_path << "\n";
    return exit_ok;
}

void print_trace(const ScaTrace& trace) {
    std::printf("  %4s  %-14s  %-12s  %-12s\n", "iter", "objective",
                "lambda_t", "lambda_r");
    for (std::size_t k = 0; k < trace.states.size(); ++k) {
        if (k == 0)
            std::printf("  %4d  %-14.8g  %-12s  %-12s\n", 0,
                        trace.states[0].objective, "-", "-");
        else
            std::printf("  %4d  %-14.8g  %-12.6g  %-12.6g\n",
                        static_cast<int>(k), trace.states[k].objective,
                        trace.duals[k - 1].lambda_t, trace.duals[k - 1].lambda_r);
    }
}

void print_vector(const char* label, const Eigen::VectorXd& v) {
    std::printf("  %s = [", label);
    for (Eigen::Index i = 0; i < v.size(); ++i)
        std::printf("%s%.6g", i ? ", " : "", v(i));
    std::printf("]\n");
}

int cmd_single(const CommonArgs& args, std::optional<double> p_t_flag,
               bool as_json) {
    ScenarioConfig cfg = default_config(TargetKind::scalar);
    nlohmann::json cfg_json;
    try {
        cfg_json = resolve_config_json(args);
        cfg = config_from_json(cfg_json);
        if (p_t_flag) require(*p_t_flag > 0.0, "--p-t must be positive");
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }
    const double p_t = p_t_flag ? *p_t_flag : cfg.p_t_grid.front();
    const Budgets budgets(p_t, cfg.p_r);

    RngStream placement_rng(cfg.seed, stream_id::placement(0));
    RngStream fading_rng(cfg.seed, stream_id::fading(0));
    const Placement placement = place_sensors(placement_rng, cfg);
    const ProblemData pd =
        build_scenario(cfg, placement, cfg.fading ? &fading_rng : nullptr);
    const PowerProblem two_hop = make_power_problem(pd.moments, pd.relay);
    const OneHopProblem one_hop =
        make_one_hop_problem(pd.moments, pd.one_hop_gain, pd.one_hop_noise);

    const OptimizeResult opt = optimize(two_hop, budgets, cfg.optimizer);
    const double mse_opt = two_hop.residual_trace + opt.trace.states.back().objective;
    const Allocation unif = uniform_allocation(two_hop.channel_powers, budgets);
    const double mse_unif = mse_of(two_hop, unif);
    const OneHopResult oh = one_hop_optimize(one_hop, p_t, cfg.optimizer);
    const double mse_oh_opt = one_hop.residual_trace + oh.trace.states.back().objective;
    const double mse_oh_unif = one_hop_mse(one_hop, one_hop_uniform(one_hop, p_t));

    if (as_json) {
        nlohmann::json j;
        j["config_hash"] = config_hash(config_to_json(cfg));
        j["p_t"] = p_t;
        j["p_r"] = cfg.p_r;
        nlohmann::json trace = nlohmann::json::array();
        for (std::size_t k = 0; k < opt.trace.states.size(); ++k) {
            nlohmann::json row;
            row["iteration"] = k;
            row["objective"] = opt.trace.states[k].objective;
            if (k > 0) {
                row["lambda_t"] = opt.trace.duals[k - 1].lambda_t;
                row["lambda_r"] = opt.trace.duals[k - 1].lambda_r;
            }
            trace.push_back(row);
        }
        j["two_hop_opt"] = {
            {"mse", mse_opt},
            {"iterations", opt.trace.iterations()},
            {"converged", opt.trace.converged},
            {"alpha", std::vector<double>(opt.alloc.alpha.begin(),
                                          opt.alloc.alpha.end())},
            {"beta", std::vector<double>(opt.alloc.beta.begin(),
                                         opt.alloc.beta.end())},
            {"trace", trace}};
        j["two_hop_uniform"] = {{"mse", mse_unif}};
        j["one_hop_opt"] = {{"mse", mse_oh_opt},
                            {"iterations", oh.trace.iterations()},
                            {"converged", oh.trace.converged},
                            {"alpha", std::vector<double>(oh.alpha.begin(),
                                                          oh.alpha.end())}};
        j["one_hop_uniform"] = {{"mse", mse_oh_unif}};
        std::cout << j.dump(2) << "\n";
        return exit_ok;
    }

    std::printf("single trial, p_t = %.6g, p_r = %.6g, %d channels\n", p_t,
                cfg.p_r, static_cast<int>(two_hop.size()));
    std::printf("\nrelayed allocator (%s after %d iterations):\n",
                opt.trace.converged ? "converged" : "stopped",
                opt.trace.iterations());
    print_trace(opt.trace);
    print_vector("alpha", opt.alloc.alpha);
    print_vector("beta", opt.alloc.beta);
    std::printf("\ndirect-link allocator (%s after %d iterations):\n",
                oh.trace.converged ? "converged" : "stopped",
                oh.trace.iterations());
    print_vector("alpha", oh.alpha);
    std::printf("\n  %-18s  %-14s\n", "method", "analytic mse");
    std::printf("  %-18s  %-14.8g\n", "two_hop_opt", mse_opt);
    std::printf("  %-18s  %-14.8g\n", "two_hop_uniform", mse_unif);
    std::printf("  %-18s  %-14.8g\n", "one_hop_opt", mse_oh_opt);
    std::printf("  %-18s  %-14.8g\n", "one_hop_uniform", mse_oh_unif);
    return exit_ok;
}

int cmd_validate(bool full) {
    const auto results =
        validate::run_validation(full ? validate::Scale::full
                                      : validate::Scale::quick);
    bool all_pass = true;
    int idx = 0;
    for (const auto& r : results) {
        ++idx;
        std::printf("[%d/%d] %-42s %s (%.1fs) %s\n", idx,
                    static_cast<int>(results.size()), r.name.c_str(),
                    r.pass ? "PASS" : "FAIL", r.seconds, r.detail.c_str());
        all_pass = all_pass && r.pass;
    }
    std::printf("%s\n", all_pass ? "all checks passed" : "CHECKS FAILED");
    return all_pass ? exit_ok : exit_runtime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MMSE power allocation over relayed sensor networks"};
    app.set_version_flag("--version", relaypower::version_string);
    app.require_subcommand(1);

    CommonArgs args;
    std::string out_path = "results.csv";
    int workers = static_cast<int>(
        std::max(1u, std::thread::hardware_concurrency()));
    std::optional<double> p_t_flag;
    bool as_json = false;
    bool full = false;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", args.config_path,
                        "JSON scenario configuration file");
        cmd->add_option("--set", args.overrides,
                        "override a config key, e.g. --set snr=1e9");
        cmd->add_option("--seed", args.seed, "master RNG seed");
        cmd->add_option("--trials", args.trials, "Monte Carlo trial count");
        cmd->add_option("--methods", args.methods,
                        "comma-separated method subset");
    };

    CLI::App* sweep = app.add_subcommand(
        "sweep", "run the Monte Carlo budget sweep and write CSV");
    add_common(sweep);
    sweep->add_option("--out", out_path, "output CSV path");
    sweep->add_option("--workers", workers, "worker thread count");

    CLI::App* single = app.add_subcommand(
        "single", "run one trial and print the allocator's trace");
    add_common(single);
    single->add_option("--p-t", p_t_flag,
                       "sensor budget (default: first grid point)");
    single->add_flag("--json", as_json, "machine-readable output");

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "run the self-validation suite");
    validate_cmd->add_flag("--full", full, "release-gate scale (slower)");
    bool quick = false;
    validate_cmd->add_flag("--quick", quick, "reduced scale (default)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) return cmd_sweep(args, out_path, workers);
        if (single->parsed()) return cmd_single(args, p_t_flag, as_json);
        return cmd_validate(full);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
}
