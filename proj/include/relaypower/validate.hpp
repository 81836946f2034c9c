#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "relaypower/config.hpp"
#include "relaypower/cubic.hpp"
#include "relaypower/oracle.hpp"
#include "relaypower/relay.hpp"
#include "relaypower/rng.hpp"
#include "relaypower/scenario.hpp"
#include "relaypower/sca.hpp"
#include "relaypower/simulate.hpp"
#include "relaypower/sweep.hpp"

namespace relaypower {
namespace validate {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// quick: reduced instance counts for interactive use.
/// full: the release gate, including wall-clock limits.
enum class Scale { quick, full };

namespace detail {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_ =
        std::chrono::steady_clock::now();
};

struct TestProblem {
    JointMoments moments;
    RelaySpec spec;
    Budgets budgets;
};

inline TestProblem random_problem(RngStream& rng, int n_max, int m_max) {
    std::uniform_int_distribution<int> nd(1, n_max), md(1, m_max);
    const int n = nd(rng.engine()), m = md(rng.engine());
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    Eigen::MatrixXd cov_x = a * a.transpose() +
                            0.1 * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd g(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    GaussianBelief prior(rng.normal_vector(n), cov_x);
    SensorNetwork net(g, Eigen::MatrixXd::Identity(m, m));
    JointMoments moments = observation_moments(prior, net);

    const auto log_u = [&](double lo, double hi) {
        return std::exp(rng.uniform(std::log(lo), std::log(hi)));
    };
    std::vector<ChannelLink> links;
    for (int j = 0; j < m; ++j)
        links.emplace_back(log_u(0.05, 5.0), log_u(0.05, 5.0), log_u(0.5, 2.0),
                           log_u(0.5, 2.0));
    RelaySpec spec(std::move(links), channel_powers(moments));
    Budgets budgets(rng.uniform(0.5, 3.0), rng.uniform(1.0, 6.0));
    return {std::move(moments), std::move(spec), budgets};
}

/// Strictly positive allocation on the budget surface; optionally zeroes a
/// few entries to exercise switched-off channels.
inline Allocation random_allocation(RngStream& rng, const Eigen::VectorXd& w,
                                    const Budgets& budgets,
                                    bool allow_zero = false) {
    const Eigen::Index m = w.size();
    Allocation alloc;
    alloc.alpha.resize(m);
    alloc.beta.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        alloc.alpha(j) = std::abs(rng.normal()) + 0.05;
        alloc.beta(j) = std::abs(rng.normal()) + 0.05;
        if (allow_zero && m > 1 && rng.uniform(0.0, 1.0) < 0.15) {
            if (rng.uniform(0.0, 1.0) < 0.5) alloc.alpha(j) = 0.0;
            else alloc.beta(j) = 0.0;
        }
    }
    const double st = alloc.alpha.dot(w);
    if (st > 0.0) alloc.alpha *= budgets.p_t / st;
    const double sr = alloc.beta.sum();
    if (sr > 0.0) alloc.beta *= budgets.p_r / sr;
    return alloc;
}

inline ScaState make_state(const PowerProblem& p, const Allocation& alloc) {
    ScaState st;
    st.alloc = alloc;
    st.phi.resize(p.size());
    for (Eigen::Index j = 0; j < p.size(); ++j)
        st.phi(j) = phi_value(alloc.alpha(j), alloc.beta(j),
                              p.coeffs[static_cast<std::size_t>(j)]);
    st.rho = rho_weights(p.psi, p.phi, st.phi);
    st.objective = objective_value(p.psi, p.phi, st.phi);
    return st;
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

inline CheckResult finish(CheckResult r, const Stopwatch& sw, bool enforce,
                          double budget_s) {
    r.seconds = sw.seconds();
    if (enforce && r.seconds >= budget_s) {
        r.pass = false;
        r.detail += "; exceeded " + fmt(budget_s) + "s wall budget";
    }
    return r;
}

}  // namespace detail

/// Check 1: the gain-and-noise posterior and the phi-diagonal posterior
/// agree entrywise and in trace on random instances.
inline CheckResult check_form_equivalence(Scale scale) {
    detail::Stopwatch sw;
    CheckResult r{"posterior forms agree", false, "", 0.0};
    const int count = scale == Scale::full ? 100 : 20;
    RngStream rng(0xF00D0001ull, 0);
    double worst_trace = 0.0, worst_entry = 0.0;
    for (int i = 0; i < count; ++i) {
        auto tp = detail::random_problem(rng, 4, 6);
        const Allocation alloc = detail::random_allocation(
            rng, tp.spec.channel_powers, tp.budgets, true);
        const PosteriorMse lhs = posterior_mse(tp.moments, tp.spec, alloc);
        const PosteriorMse rhs =
            posterior_mse_gain_form(tp.moments, tp.spec, alloc);
        worst_trace = std::max(
            worst_trace, std::abs(lhs.trace - rhs.trace) / std::abs(rhs.trace));
        const double scale_e = 1.0 + rhs.cov.cwiseAbs().maxCoeff();
        worst_entry = std::max(
            worst_entry, (lhs.cov - rhs.cov).cwiseAbs().maxCoeff() / scale_e);
    }
    r.pass = worst_trace <= 1e-8 && worst_entry <= 1e-8;
    r.detail = std::to_string(count) + " instances, max rel trace diff " +
               detail::fmt(worst_trace) + ", max entry diff " +
               detail::fmt(worst_entry);
    return detail::finish(std::move(r), sw, scale == Scale::full, 5.0);
}

/// Check 2: the surrogate is tight at its expansion point and dominates the
/// objective across random feasible allocations.
inline CheckResult check_majorant(Scale scale) {
    detail::Stopwatch sw;
    CheckResult r{"surrogate tight and dominant", false, "", 0.0};
    const int states = scale == Scale::full ? 20 : 5;
    const int probes = scale == Scale::full ? 1000 : 100;
    RngStream rng(0xF00D0002ull, 0);
    double worst_tight = 0.0, worst_gap = 0.0;
    for (int i = 0; i < states; ++i) {
        auto tp = detail::random_problem(rng, 4, 6);
        const PowerProblem p = make_power_problem(tp.moments, tp.spec);
        const ScaState st = detail::make_state(
            p, detail::random_allocation(rng, p.channel_powers, tp.budgets));
        const double at_point = majorant_eval(st, st.alloc, p.coeffs);
        worst_tight =
            std::max(worst_tight, std::abs(at_point - st.objective) /
                                      std::max(1.0, std::abs(st.objective)));
        for (int k = 0; k < probes; ++k) {
            const Allocation probe =
                detail::random_allocation(rng, p.channel_powers, tp.budgets);
            const double maj = majorant_eval(st, probe, p.coeffs);
            const double obj = objective_value(
                p.psi, p.phi,
                phi_vector(tp.spec, probe));
            worst_gap = std::min(worst_gap,
                                 (maj - obj) / std::max(1.0, std::abs(obj)));
        }
    }
    r.pass = worst_tight <= 1e-12 && worst_gap >= -1e-10;
    r.detail = std::to_string(states) + " states x " + std::to_string(probes) +
               " probes, tightness " + detail::fmt(worst_tight) +
               ", min dominance margin " + detail::fmt(worst_gap);
    return detail::finish(std::move(r), sw, scale == Scale::full, 30.0);
}

/// Check 3: the allocator's objective sequence never increases and the
/// default tolerance is reached within the iteration cap on nearly all
/// random problems.
inline CheckResult check_descent(Scale scale) {
    detail::Stopwatch sw;
    CheckResult r{"allocator descends and converges", false, "", 0.0};
    const int count = scale == Scale::full ? 1000 : 50;
    RngStream rng(0xF00D0003ull, 0);
    int converged = 0, monotone_violations = 0;
    for (int i = 0; i < count; ++i) {
        auto tp = detail::random_problem(rng, 4, 10);
        const PowerProblem p = make_power_problem(tp.moments, tp.spec);
        const OptimizeResult res = optimize(p, tp.budgets);
        if (res.trace.converged) ++converged;
        for (std::size_t k = 1; k < res.trace.states.size(); ++k) {
            const double prev = res.trace.states[k - 1].objective;
            const double cur = res.trace.states[k].objective;
            if (cur > prev + 1e-12 * std::max(1.0, std::abs(prev)))
                ++monotone_violations;
        }
    }
    const double frac = static_cast<double>(converged) / count;
    r.pass = monotone_violations == 0 && frac >= 0.99;
    r.detail = std::to_string(count) + " problems, " +
               std::to_string(monotone_violations) + " monotonicity violations, " +
               detail::fmt(100.0 * frac) + "% converged";
    return detail::finish(std::move(r), sw, scale == Scale::full, 120.0);
}

/// Check 4: the cubic solver's residuals stay at round-off across a wide
/// coefficient range and match an independent bisection.
inline CheckResult check_cubic(Scale scale) {
    detail::Stopwatch sw;
    CheckResult r{"cubic root solver", false, "", 0.0};
    const int count = scale == Scale::full ? 10000 : 1000;
    RngStream rng(0xF00D0004ull, 0);
    const auto log_u = [&](double lo, double hi) {
        return std::exp(rng.uniform(std::log(lo), std::log(hi)));
    };
    double worst_res = 0.0, worst_diff = 0.0;
    for (int i = 0; i < count; ++i) {
        const double lead = log_u(1e-6, 1e6);
        double lin = log_u(1e-6, 1e6), con = log_u(1e-6, 1e6);
        const double pick = rng.uniform(0.0, 1.0);
        if (pick < 0.1) lin = 0.0;
        else if (pick < 0.2) con = 0.0;
        const double x = cubic_positive_root(lead, lin, con);
        const double res = std::abs(lead * x * x * x - lin * x - con);
        worst_res = std::max(worst_res, res / std::max(1.0, lead * x * x * x));

        double lo = 0.0, hi = std::sqrt(lin / lead) + std::cbrt(con / lead);
        for (int b = 0; b < 200; ++b) {
            const double mid = 0.5 * (lo + hi);
            (lead * mid * mid * mid - lin * mid - con > 0.0 ? hi : lo) = mid;
        }
        const double xb = 0.5 * (lo + hi);
        worst_diff = std::max(worst_diff, std::abs(x - xb) / std::max(1.0, xb));
    }
    r.pass = worst_res <= 1e-12 && worst_diff <= 1e-10;
    r.detail = std::to_string(count) + " triples, max scaled residual " +
               detail::fmt(worst_res) + ", max gap to bisection " +
               detail::fmt(worst_diff);
    return detail::finish(std::move(r), sw, scale == Scale::full, 5.0);
}

/// Check 5: the dual searches meet their budgets exactly and reproduce the
/// closed forms for one channel and for identical channels.
inline CheckResult check_dual_search(Scale scale) {
    detail::Stopwatch sw;
    CheckResult r{"dual search meets budgets", false, "", 0.0};
    const int count = scale == Scale::full ? 1000 : 100;
    RngStream rng(0xF00D0005ull, 0);
    const auto log_u = [&](double lo, double hi) {
        return std::exp(rng.uniform(std::log(lo), std::log(hi)));
    };
    const ScaOptions opts;
    double worst_budget = 0.0, worst_closed = 0.0, worst_kkt = 0.0;
    std::uniform_int_distribution<int> md(1, 10);
    for (int i = 0; i < count; ++i) {
        const int m = md(rng.engine());
        MajorantCoeffs mc;
        mc.a.resize(m); mc.b.resize(m); mc.c.resize(m); mc.d.resize(m);
        Eigen::VectorXd w(m);
        for (int j = 0; j < m; ++j) {
            mc.a(j) = rng.uniform(0.0, 1.0) < 0.15 ? 0.0 : log_u(1e-4, 1e2);
            mc.c(j) = rng.uniform(0.0, 1.0) < 0.15 ? 0.0 : log_u(1e-4, 1e2);
            mc.b(j) = rng.uniform(0.0, 1.0) < 0.15 ? 0.0 : log_u(1e-4, 1e2);
            mc.d(j) = rng.uniform(0.0, 1.0) < 0.15 ? 0.0 : log_u(1e-4, 1e2);
            w(j) = log_u(0.1, 10.0);
        }
        const double p_t = log_u(0.1, 10.0), p_r = log_u(0.1, 10.0);
        const DualSearchResult rs = golden_search_sensors(mc, w, p_t, opts);
        const DualSearchResult rr = golden_search_relay(mc, p_r, opts);
        worst_budget = std::max(
            worst_budget, std::abs(rs.values.dot(w) - p_t) / p_t);
        worst_budget = std::max(
            worst_budget, std::abs(rr.values.sum() - p_r) / p_r);
        if (!rs.all_degenerate)
            for (int j = 0; j < m; ++j)
                if (mc.a(j) + mc.c(j) > 0.0) {
                    const double x = rs.values(j);
                    const double res = std::abs(rs.lambda * w(j) * x * x * x -
                                                mc.a(j) * x - mc.c(j));
                    worst_kkt = std::max(
                        res / std::max(1.0, rs.lambda * w(j) * x * x * x),
                        worst_kkt);
                }
    }
    // One-channel and identical-channel closed forms.
    {
        MajorantCoeffs mc;
        mc.a = Eigen::VectorXd::Constant(1, 2.0);
        mc.b = mc.a; mc.c = mc.a; mc.d = mc.a;
        Eigen::VectorXd w = Eigen::VectorXd::Constant(1, 1.7);
        const DualSearchResult rs = golden_search_sensors(mc, w, 2.5, opts);
        worst_closed = std::max(worst_closed,
                                std::abs(rs.values(0) - 2.5 / 1.7) / (2.5 / 1.7));
    }
    {
        const int m = 4;
        MajorantCoeffs mc;
        mc.a = Eigen::VectorXd::Constant(m, 0.3);
        mc.b = mc.a;
        mc.c = Eigen::VectorXd::Constant(m, 0.9);
        mc.d = mc.c;
        Eigen::VectorXd w = Eigen::VectorXd::Constant(m, 2.0);
        const DualSearchResult rs = golden_search_sensors(mc, w, 4.0, opts);
        for (int j = 0; j < m; ++j)
            worst_closed = std::max(worst_closed,
                                    std::abs(rs.values(j) - 0.5) / 0.5);
    }
    r.pass = worst_budget <= 1e-8 && worst_closed <= 1e-12 && worst_kkt <= 1e-6;
    r.detail = std::to_string(count) + " coefficient sets, budget gap " +
               detail::fmt(worst_budget) + ", closed-form gap " +
               detail::fmt(worst_closed) + ", stationarity residual " +
               detail::fmt(worst_kkt);
    return detail::finish(std::move(r), sw, scale == Scale::full, 10.0);
}

/// Check 6: on two-channel problems the allocator lands within half a
/// percent of an exhaustive scan of the budget surface.
inline CheckResult check_grid_agreement(Scale scale) {
    detail::Stopwatch sw;
    CheckResult r{"allocator matches exhaustive scan", false, "", 0.0};
    const int count = scale == Scale::full ? 50 : 5;
    const int resolution = scale == Scale::full ? 200 : 60;
    RngStream rng(0xF00D0006ull, 0);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        detail::TestProblem tp = [&] {
            for (;;) {
                auto cand = detail::random_problem(rng, 1, 2);
                if (cand.spec.size() == 2) return cand;
            }
        }();
        const PowerProblem p = make_power_problem(tp.moments, tp.spec);
        const OptimizeResult res = optimize(p, tp.budgets);
        const double mse_opt =
            p.residual_trace + res.trace.states.back().objective;
        const oracle::GridResult grid = oracle::grid_search_mse(
            tp.moments, tp.spec, tp.budgets, oracle::GridSpec(resolution));
        worst = std::max(worst, std::abs(mse_opt - grid.mse) / grid.mse);
    }
    r.pass = worst <= 0.005;
    r.detail = std::to_string(count) + " two-channel instances at resolution " +
               std::to_string(resolution) + ", max rel gap " + detail::fmt(worst);
    return detail::finish(std::move(r), sw, scale == Scale::full, 120.0);
}

/// Check 7: simulated estimation error matches the analytic posterior trace
/// within three standard errors across a scenario matrix.
inline CheckResult check_empirical_consistency(Scale scale) {
    detail::Stopwatch sw;
    CheckResult r{"simulation matches analytic error", false, "", 0.0};
    const long samples = scale == Scale::full ? 100000 : 20000;
    const std::uint64_t seed = 0xF00D0007ull;

    struct Case {
        TargetKind kind;
        int sensors;
        double p_t;
        bool optimized;
        bool fading;
    };
    const std::vector<Case> cases = {
        {TargetKind::scalar, 1, 0.5, false, false},
        {TargetKind::scalar, 3, 0.7, true, false},
        {TargetKind::scalar, 10, 0.5, false, false},
        {TargetKind::scalar, 10, 1.0, true, false},
        {TargetKind::scalar, 5, 0.2, false, false},
        {TargetKind::vector, 2, 0.5, false, false},
        {TargetKind::vector, 4, 1.0, true, false},
        {TargetKind::vector, 10, 0.3, false, false},
        {TargetKind::vector, 10, 0.5, true, false},
        {TargetKind::scalar, 10, 0.5, false, true},
    };
    const std::size_t n_cases = scale == Scale::full ? cases.size() : 3;

    double worst_sigmas = 0.0;
    for (std::size_t i = 0; i < n_cases; ++i) {
        const Case& cs = cases[i];
        ScenarioConfig c = default_config(cs.kind);
        c.sensor_count = cs.sensors;
        c.fading = cs.fading;
        RngStream placement_rng(seed, stream_id::placement(static_cast<long>(i)));
        RngStream fading_rng(seed, stream_id::fading(static_cast<long>(i)));
        const Placement placement = place_sensors(placement_rng, c);
        const ProblemData pd =
            build_scenario(c, placement, cs.fading ? &fading_rng : nullptr);
        const PowerProblem p = make_power_problem(pd.moments, pd.relay);
        const Budgets budgets(cs.p_t, c.p_r);
        const Allocation alloc =
            cs.optimized ? optimize(p, budgets, c.optimizer).alloc
                         : uniform_allocation(p.channel_powers, budgets);
        const double analytic = posterior_mse(pd.moments, pd.relay, alloc).trace;
        RngStream sample_rng(seed, stream_id::sampling(static_cast<long>(i)));
        const EmpiricalMse emp =
            simulate_realization(pd, alloc, sample_rng, samples);
        worst_sigmas = std::max(worst_sigmas,
                                std::abs(emp.mean - analytic) / emp.std_err);
    }
    r.pass = worst_sigmas <= 3.0;
    r.detail = std::to_string(n_cases) + " scenarios x " +
               std::to_string(samples) + " samples, worst gap " +
               detail::fmt(worst_sigmas) + " standard errors";
    return detail::finish(std::move(r), sw, scale == Scale::full, 120.0);
}

namespace detail {

struct ShapeStats {
    long dominance_violations = 0;
    double worst_monotone_sigmas = 0.0;
    bool opt_strictly_lowest = true;
};

inline ShapeStats curve_shape_stats(const ScenarioConfig& c,
                                    const SweepResult& sweep,
                                    bool check_lowest) {
    ShapeStats st;
    const std::size_t nb = c.p_t_grid.size();
    const std::size_t nk = c.methods.size();
    const long nt = c.trials;
    std::size_t opt_idx = nk, unif_idx = nk;
    for (std::size_t k = 0; k < nk; ++k) {
        if (c.methods[k] == Method::two_hop_opt) opt_idx = k;
        if (c.methods[k] == Method::two_hop_uniform) unif_idx = k;
    }

    if (opt_idx < nk && unif_idx < nk)
        for (std::size_t b = 0; b < nb; ++b)
            for (long t = 0; t < nt; ++t) {
                const double o = sweep.per_trial[b][opt_idx][static_cast<std::size_t>(t)];
                const double u = sweep.per_trial[b][unif_idx][static_cast<std::size_t>(t)];
                if (o > u + 1e-12 * std::max(1.0, std::abs(u)))
                    ++st.dominance_violations;
            }

    for (std::size_t k = 0; k < nk; ++k)
        for (std::size_t b = 0; b + 1 < nb; ++b) {
            double mean = 0.0;
            for (long t = 0; t < nt; ++t)
                mean += sweep.per_trial[b + 1][k][static_cast<std::size_t>(t)] -
                        sweep.per_trial[b][k][static_cast<std::size_t>(t)];
            mean /= static_cast<double>(nt);
            double var = 0.0;
            for (long t = 0; t < nt; ++t) {
                const double d =
                    sweep.per_trial[b + 1][k][static_cast<std::size_t>(t)] -
                    sweep.per_trial[b][k][static_cast<std::size_t>(t)] - mean;
                var += d * d;
            }
            const double se =
                nt > 1 ? std::sqrt(var / static_cast<double>(nt - 1) /
                                   static_cast<double>(nt))
                       : 0.0;
            if (mean > 0.0)
                st.worst_monotone_sigmas =
                    std::max(st.worst_monotone_sigmas,
                             mean / std::max(se, 1e-15));
        }

    if (check_lowest && opt_idx < nk)
        for (std::size_t b = 0; b < nb; ++b) {
            const auto mean_of = [&](std::size_t k) {
                double s = 0.0;
                for (double v : sweep.per_trial[b][k]) s += v;
                return s / static_cast<double>(nt);
            };
            const double opt_mean = mean_of(opt_idx);
            for (std::size_t k = 0; k < nk; ++k)
                if (k != opt_idx && opt_mean >= mean_of(k))
                    st.opt_strictly_lowest = false;
        }
    return st;
}

}  // namespace detail

/// Check 8: Monte Carlo budget sweeps have the expected shape: optimized
/// never behind uniform trial-by-trial, error nonincreasing in the sensor
/// budget, and (vector scenario) optimized relaying strictly best on
/// average at every budget.
inline CheckResult check_curve_shape(Scale scale) {
    detail::Stopwatch sw;
    CheckResult r{"sweep curves have expected shape", false, "", 0.0};
    const long trials = scale == Scale::full ? 500 : 30;
    const int workers =
        std::max(1u, std::thread::hardware_concurrency());

    ScenarioConfig scalar_c = default_config(TargetKind::scalar);
    scalar_c.trials = trials;
    scalar_c.seed = 20260816ull;
    const SweepResult scalar_sweep = run_sweep(scalar_c, workers);
    const auto scalar_stats =
        detail::curve_shape_stats(scalar_c, scalar_sweep, false);

    ScenarioConfig vector_c = default_config(TargetKind::vector);
    vector_c.trials = trials;
    vector_c.seed = 20260817ull;
    const SweepResult vector_sweep = run_sweep(vector_c, workers);
    const auto vector_stats =
        detail::curve_shape_stats(vector_c, vector_sweep, true);

    const long dom = scalar_stats.dominance_violations +
                     vector_stats.dominance_violations;
    const double mono = std::max(scalar_stats.worst_monotone_sigmas,
                                 vector_stats.worst_monotone_sigmas);
    r.pass = dom == 0 && mono <= 3.0 && vector_stats.opt_strictly_lowest;
    r.detail = std::to_string(trials) + " trials/scenario, " +
               std::to_string(dom) + " dominance violations, worst budget" +
               "-monotonicity excess " + detail::fmt(mono) +
               " standard errors, optimized relaying strictly lowest: " +
               (vector_stats.opt_strictly_lowest ? "yes" : "no");
    return detail::finish(std::move(r), sw, scale == Scale::full, 600.0);
}

/// Check 9: identical configuration and seed reproduce byte-identical CSV,
/// independently of the worker count.
inline CheckResult check_determinism(Scale scale) {
    detail::Stopwatch sw;
    CheckResult r{"seed-identical reruns are byte-identical", false, "", 0.0};
    ScenarioConfig c = default_config(TargetKind::scalar);
    c.trials = scale == Scale::full ? 60 : 15;
    c.seed = 777ull;
    const std::string a = to_csv(run_sweep(c, 1).rows);
    const std::string b = to_csv(run_sweep(c, 1).rows);
    const std::string d = to_csv(run_sweep(c, 3).rows);

    ScenarioConfig vc = default_config(TargetKind::vector);
    vc.trials = scale == Scale::full ? 20 : 6;
    vc.seed = 778ull;
    vc.placement_mode = PlacementMode::permute;
    const std::string va = to_csv(run_sweep(vc, 1).rows);
    const std::string vb = to_csv(run_sweep(vc, 2).rows);

    r.pass = a == b && a == d && va == vb;
    r.detail = "scalar rerun match: " + std::string(a == b ? "yes" : "no") +
               ", worker-count match: " + std::string(a == d ? "yes" : "no") +
               ", vector match: " + std::string(va == vb ? "yes" : "no") +
               " (" + std::to_string(a.size()) + " bytes)";
    return detail::finish(std::move(r), sw, false, 0.0);
}

inline std::vector<CheckResult> run_validation(Scale scale) {
    std::vector<CheckResult> out;
    out.push_back(check_form_equivalence(scale));
    out.push_back(check_majorant(scale));
    out.push_back(check_descent(scale));
    out.push_back(check_cubic(scale));
    out.push_back(check_dual_search(scale));
    out.push_back(check_grid_agreement(scale));
    out.push_back(check_empirical_consistency(scale));
    out.push_back(check_curve_shape(scale));
    out.push_back(check_determinism(scale));
    return out;
}

}  // namespace validate
}  // namespace relaypower
