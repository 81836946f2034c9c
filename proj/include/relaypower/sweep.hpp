#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "relaypower/numeric.hpp"
#include "relaypower/scenario.hpp"
#include "relaypower/sca.hpp"

namespace relaypower {

/// Stream-id layout under one master seed.  Trial streams leave room for
/// several independent purposes per trial.
namespace stream_id {
inline constexpr std::uint64_t canonical_placement = 0;
inline std::uint64_t placement(long trial) {
    return 16 + 4 * static_cast<std::uint64_t>(trial);
}
inline std::uint64_t fading(long trial) {
    return 17 + 4 * static_cast<std::uint64_t>(trial);
}
inline std::uint64_t sampling(long trial) {
    return 18 + 4 * static_cast<std::uint64_t>(trial);
}
}  // namespace stream_id

/// One method at one budget in one trial.
struct TrialResult {
    double p_t = 0.0;
    Method method = Method::two_hop_opt;
    double mse = 0.0;
    int iterations = 0;
    bool converged = true;
};

/// Aggregated curve point, one per (budget, method).
struct CurveRow {
    double p_t = 0.0;
    Method method = Method::two_hop_opt;
    double mean_mse = 0.0;
    double std_err = 0.0;
    long trials = 0;
    double converged_fraction = 1.0;
};

struct SweepResult {
    std::vector<CurveRow> rows;
    // per_trial[b][k][t]: budget index b, method index k (config order), trial t.
    std::vector<std::vector<std::vector<double>>> per_trial;
};

namespace detail {

inline TrialResult run_method(const ScenarioConfig& c, const ProblemData& pd,
                              const PowerProblem& two_hop,
                              const OneHopProblem& one_hop, double p_t,
                              Method method) {
    TrialResult r;
    r.p_t = p_t;
    r.method = method;
    const Budgets budgets(p_t, c.p_r);
    switch (method) {
        case Method::two_hop_opt: {
            OptimizeResult opt = optimize(two_hop, budgets, c.optimizer);
            r.mse = two_hop.residual_trace + opt.trace.states.back().objective;
            r.iterations = opt.trace.iterations();
            r.converged = opt.trace.converged;
            break;
        }
        case Method::two_hop_uniform: {
            const Allocation alloc =
                uniform_allocation(two_hop.channel_powers, budgets);
            r.mse = mse_of(two_hop, alloc);
            break;
        }
        case Method::one_hop_opt: {
            OneHopResult opt = one_hop_optimize(one_hop, p_t, c.optimizer);
            r.mse = one_hop.residual_trace + opt.trace.states.back().objective;
            r.iterations = opt.trace.iterations();
            r.converged = opt.trace.converged;
            break;
        }
        case Method::one_hop_uniform: {
            r.mse = one_hop_mse(one_hop, one_hop_uniform(one_hop, p_t));
            break;
        }
    }
    return r;
}

}  // namespace detail

/// Runs the Monte Carlo budget sweep.  Trials are independent: each draws
/// its own placement (and fading, when enabled) from per-trial streams, so
/// the result is identical for any worker count.
inline SweepResult run_sweep(const ScenarioConfig& c, int workers = 1) {
    validate_config(c);
    const std::size_t nb = c.p_t_grid.size();
    const std::size_t nk = c.methods.size();
    const long nt = c.trials;

    SweepResult out;
    out.per_trial.assign(nb, std::vector<std::vector<double>>(
                                 nk, std::vector<double>(
                                         static_cast<std::size_t>(nt), 0.0)));
    std::vector<std::vector<std::vector<char>>> conv(
        nb, std::vector<std::vector<char>>(
                nk, std::vector<char>(static_cast<std::size_t>(nt), 1)));

    std::vector<Eigen::Vector3d> canonical;
    if (c.placement_mode == PlacementMode::permute) {
        RngStream rng(c.seed, stream_id::canonical_placement);
        canonical = place_sensors(rng, c).sensors;
    }

    const auto run_trial = [&](long t) {
        RngStream placement_rng(c.seed, stream_id::placement(t));
        RngStream fading_rng(c.seed, stream_id::fading(t));
        const Placement placement =
            c.placement_mode == PlacementMode::permute
                ? place_sensors(placement_rng, c, &canonical)
                : place_sensors(placement_rng, c);
        const ProblemData pd =
            build_scenario(c, placement, c.fading ? &fading_rng : nullptr);
        const PowerProblem two_hop = make_power_problem(pd.moments, pd.relay);
        const OneHopProblem one_hop =
            make_one_hop_problem(pd.moments, pd.one_hop_gain, pd.one_hop_noise);
        for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t k = 0; k < nk; ++k) {
                const TrialResult r = detail::run_method(
                    c, pd, two_hop, one_hop, c.p_t_grid[b], c.methods[k]);
                out.per_trial[b][k][static_cast<std::size_t>(t)] = r.mse;
                conv[b][k][static_cast<std::size_t>(t)] = r.converged ? 1 : 0;
            }
    };

    if (workers <= 1) {
        for (long t = 0; t < nt; ++t) run_trial(t);
    } else {
        std::atomic<long> next{0};
        std::vector<std::thread> pool;
        std::exception_ptr error;
        std::mutex error_mutex;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const long t = next.fetch_add(1);
                    if (t >= nt) return;
                    try {
                        run_trial(t);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!error) error = std::current_exception();
                        return;
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (error) std::rethrow_exception(error);
    }

    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t k = 0; k < nk; ++k) {
            CurveRow row;
            row.p_t = c.p_t_grid[b];
            row.method = c.methods[k];
            row.trials = nt;
            const auto& xs = out.per_trial[b][k];
            double mean = 0.0;
            for (double v : xs) mean += v;
            mean /= static_cast<double>(nt);
            double var = 0.0;
            for (double v : xs) var += (v - mean) * (v - mean);
            row.mean_mse = mean;
            row.std_err = nt > 1 ? std::sqrt(var / static_cast<double>(nt - 1) /
                                             static_cast<double>(nt))
                                 : 0.0;
            long nconv = 0;
            for (char f : conv[b][k]) nconv += f;
            row.converged_fraction =
                static_cast<double>(nconv) / static_cast<double>(nt);
            out.rows.push_back(row);
        }
    return out;
}

/// Shortest round-trip decimal text of a double; locale-independent.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// CSV with a fixed header and one row per (budget, method), budgets outer.
inline std::string to_csv(const std::vector<CurveRow>& rows) {
    std::string s = "p_t,method,mean_mse,std_err,trials,converged_fraction\n";
    for (const CurveRow& r : rows) {
        s += format_double(r.p_t);
        s += ',';
        s += method_name(r.method);
        s += ',';
        s += format_double(r.mean_mse);
        s += ',';
        s += format_double(r.std_err);
        s += ',';
        s += std::to_string(r.trials);
        s += ',';
        s += format_double(r.converged_fraction);
        s += '\n';
    }
    return s;
}

}  // namespace relaypower
