#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "relaypower/cubic.hpp"
#include "relaypower/gaussian.hpp"
#include "relaypower/numeric.hpp"
#include "relaypower/relay.hpp"

namespace relaypower {

/// Tuning knobs of the successive-approximation power allocator.
struct ScaOptions {
    double epsilon = 1e-4;              // relative-decrease stopping threshold
    int max_iterations = 200;           // maximum surrogate minimizations
    double bisection_tolerance = 1e-8;  // relative budget-equality tolerance
    int max_bisection_steps = 200;      // dual-search step cap
    double floor = 1e-12;               // power level for inactive channels
    std::optional<Allocation> initialization;  // default: budget-uniform
};

/// Minimization problem data frozen per scenario: whitened moments, the
/// per-channel phi coefficients, channel powers, and the floor of the MSE
/// (the part no power allocation can remove).
struct PowerProblem {
    Eigen::MatrixXd psi;  // M x N, C_Y^{-1} C_YX
    Eigen::MatrixXd phi;  // M x M, C_Y^{-1}
    std::vector<PhiCoefficients> coeffs;
    Eigen::VectorXd channel_powers;
    double residual_trace = 0.0;

    Eigen::Index size() const { return channel_powers.size(); }
};

inline PowerProblem make_power_problem(const JointMoments& m,
                                       const RelaySpec& spec) {
    require(spec.size() == m.channel_count(),
            "make_power_problem: relay size must match channel count");
    PowerProblem p;
    const PsiPhi pp = psi_phi(m);
    p.psi = pp.psi;
    p.phi = pp.phi;
    p.coeffs = phi_coefficients(spec);
    p.channel_powers = spec.channel_powers;
    p.residual_trace = (m.cov_x - m.cov_xy * pp.psi).trace();
    return p;
}

/// One iterate of the allocator: the allocation, its per-channel ratios,
/// the curvature weights rho used to build the next surrogate, and the
/// objective value (the removable part of the MSE).
struct ScaState {
    Allocation alloc;
    Eigen::VectorXd phi;
    Eigen::VectorXd rho;
    double objective = 0.0;
    int iteration = 0;
};

/// Weights of the surrogate: rho_j is the j-th diagonal entry of
///   diag(phi) (Phi + diag(phi))^{-1} Psi Psi^T (Phi + diag(phi))^{-1} diag(phi),
/// i.e. rho_j = phi_j^2 * || row_j((Phi + diag(phi))^{-1} Psi) ||^2.
inline Eigen::VectorXd rho_weights(const Eigen::MatrixXd& psi,
                                   const Eigen::MatrixXd& phi,
                                   const Eigen::VectorXd& phi_diag) {
    require(phi_diag.size() == psi.rows() && phi.rows() == psi.rows(),
            "rho_weights: dimension mismatch");
    require((phi_diag.array() >= 0.0).all(),
            "rho_weights: phi entries must be nonnegative");
    Eigen::MatrixXd s = phi;
    s.diagonal() += phi_diag;
    SpdSolver solver(s, "rho_weights: shifted precision");
    Eigen::MatrixXd b = solver.solve(psi);
    Eigen::VectorXd rho(phi_diag.size());
    for (Eigen::Index j = 0; j < rho.size(); ++j)
        rho(j) = phi_diag(j) * phi_diag(j) * b.row(j).squaredNorm();
    return rho;
}

namespace detail {

/// phi vector, rho weights and objective of an allocation, sharing one
/// factorization of Phi + diag(phi).
inline ScaState state_at(const PowerProblem& p, const Allocation& alloc,
                         int iteration) {
    check_allocation(alloc, p.size());
    ScaState st;
    st.alloc = alloc;
    st.iteration = iteration;
    st.phi.resize(p.size());
    for (Eigen::Index j = 0; j < p.size(); ++j)
        st.phi(j) = phi_value(alloc.alpha(j), alloc.beta(j),
                              p.coeffs[static_cast<std::size_t>(j)]);
    Eigen::MatrixXd s = p.phi;
    s.diagonal() += st.phi;
    SpdSolver solver(s, "sca state: shifted precision");
    Eigen::MatrixXd b = solver.solve(p.psi);
    st.objective = (p.psi.array() * b.array()).sum();
    st.rho.resize(p.size());
    for (Eigen::Index j = 0; j < p.size(); ++j)
        st.rho(j) = st.phi(j) * st.phi(j) * b.row(j).squaredNorm();
    return st;
}

}  // namespace detail

/// Objective phi(alpha, beta) = trace(Psi^T (Phi + diag(phi))^{-1} Psi).
inline double objective(const PowerProblem& p, const Allocation& alloc) {
    return detail::state_at(p, alloc, 0).objective;
}

/// Total analytic MSE at an allocation: unavoidable part plus objective.
inline double mse_of(const PowerProblem& p, const Allocation& alloc) {
    return p.residual_trace + objective(p, alloc);
}

/// Value of the convex surrogate built at `state`, evaluated at `alloc`
/// (which must be strictly positive):
///   objective(state) + sum_j rho_j [ r/(p a) + q/(p b)
///     + sigma/(2 p) (a_k/(b_k a^2) + b_k/(a_k b^2)) - 1/phi_k ]
/// with (a_k, b_k, phi_k) taken from the state.  Tight at state.alloc and
/// an upper bound everywhere on the positive orthant.
inline double majorant_eval(const ScaState& state, const Allocation& alloc,
                            const std::vector<PhiCoefficients>& coeffs) {
    const Eigen::Index m = state.alloc.alpha.size();
    require(alloc.alpha.size() == m && alloc.beta.size() == m,
            "majorant_eval: allocation size mismatch");
    require((alloc.alpha.array() > 0.0).all() && (alloc.beta.array() > 0.0).all(),
            "majorant_eval: surrogate requires strictly positive powers");
    require((state.alloc.alpha.array() > 0.0).all() &&
                (state.alloc.beta.array() > 0.0).all(),
            "majorant_eval: expansion point must be strictly positive");
    require(static_cast<Eigen::Index>(coeffs.size()) == m,
            "majorant_eval: coefficient count mismatch");

    double value = state.objective;
    for (Eigen::Index j = 0; j < m; ++j) {
        const double rho = state.rho(j);
        if (rho == 0.0) continue;
        const PhiCoefficients& c = coeffs[static_cast<std::size_t>(j)];
        const double a = alloc.alpha(j), b = alloc.beta(j);
        const double ak = state.alloc.alpha(j), bk = state.alloc.beta(j);
        const double cross = 0.5 * c.sigma / c.p *
                             (ak / (bk * a * a) + bk / (ak * b * b));
        value += rho * (c.r / (c.p * a) + c.q / (c.p * b) + cross -
                        1.0 / state.phi(j));
    }
    return value;
}

/// Coefficients of the separable surrogate terms
///   a_j / alpha_j + c_j / alpha_j^2   (sensor side)
///   b_j / beta_j  + d_j / beta_j^2    (relay side).
struct MajorantCoeffs {
    Eigen::VectorXd a;
    Eigen::VectorXd b;
    Eigen::VectorXd c;
    Eigen::VectorXd d;
};

inline MajorantCoeffs majorant_coeffs(const ScaState& state,
                                      const std::vector<PhiCoefficients>& coeffs) {
    const Eigen::Index m = state.alloc.alpha.size();
    require(static_cast<Eigen::Index>(coeffs.size()) == m,
            "majorant_coeffs: coefficient count mismatch");
    require((state.alloc.alpha.array() > 0.0).all() &&
                (state.alloc.beta.array() > 0.0).all(),
            "majorant_coeffs: expansion point must be strictly positive");
    MajorantCoeffs mc;
    mc.a.resize(m); mc.b.resize(m); mc.c.resize(m); mc.d.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const PhiCoefficients& c = coeffs[static_cast<std::size_t>(j)];
        const double rho = state.rho(j);
        const double ak = state.alloc.alpha(j), bk = state.alloc.beta(j);
        mc.a(j) = rho * c.r / c.p;
        mc.b(j) = rho * c.q / c.p;
        mc.c(j) = rho * c.sigma * ak / (c.p * bk);
        mc.d(j) = rho * c.sigma * bk / (c.p * ak);
    }
    return mc;
}

/// Result of one dual (water-level) search.
struct DualSearchResult {
    double lambda = 0.0;
    Eigen::VectorXd values;
    int bisection_steps = 0;
    bool all_degenerate = false;  // every channel weightless: uniform fallback
    bool budget_met = true;       // bisection reached its tolerance
};

namespace detail {

/// Minimizes  sum_j lin_j/x_j + con_j/x_j^2  subject to
/// sum_j w_j x_j = budget, x > 0.  Stationarity gives the per-channel cubic
///   lambda w_j x^3 = lin_j x + con_j,
/// whose root decreases in lambda, so the dual is found by doubling then
/// bisection; final values are rescaled onto the budget surface.
inline DualSearchResult dual_power_search(const Eigen::VectorXd& lin,
                                          const Eigen::VectorXd& con,
                                          const Eigen::VectorXd& weights,
                                          double budget, const ScaOptions& opts) {
    const Eigen::Index m = lin.size();
    require(con.size() == m && weights.size() == m,
            "dual_power_search: coefficient size mismatch");
    require(budget > 0.0, "dual_power_search: budget must be positive");
    require((lin.array() >= 0.0).all() && (con.array() >= 0.0).all(),
            "dual_power_search: coefficients must be nonnegative");
    require((weights.array() > 0.0).all(),
            "dual_power_search: weights must be positive");

    DualSearchResult res;
    res.values = Eigen::VectorXd::Constant(m, opts.floor);

    std::vector<Eigen::Index> active;
    double floor_budget = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        if (lin(j) + con(j) > 0.0)
            active.push_back(j);
        else
            floor_budget += weights(j) * opts.floor;
    }
    if (active.empty()) {
        // Objective is flat: spread the budget evenly across channels.
        for (Eigen::Index j = 0; j < m; ++j)
            res.values(j) = budget / (static_cast<double>(m) * weights(j));
        res.all_degenerate = true;
        return res;
    }
    const double target = budget - floor_budget;
    require(target > 0.0, "dual_power_search: floor consumes the whole budget");

    const auto spent = [&](double lambda, Eigen::VectorXd& x) {
        double s = 0.0;
        for (Eigen::Index j : active) {
            x(j) = cubic_positive_root(lambda * weights(j), lin(j), con(j));
            s += weights(j) * x(j);
        }
        return s;
    };

    // Seed so the argmax channel alone would consume the full budget, then
    // expand the bracket in whichever direction is still needed.
    double lambda_lo = 0.0;
    for (Eigen::Index j : active) {
        const double cand =
            (lin(j) / (budget * budget) + con(j) / (budget * budget * budget)) /
            weights(j);
        lambda_lo = std::max(lambda_lo, cand);
    }
    Eigen::VectorXd x = res.values;
    double s_lo = spent(lambda_lo, x);
    int guard = 0;
    while (s_lo < target && guard++ < 2000) {
        lambda_lo *= 0.5;
        s_lo = spent(lambda_lo, x);
    }
    double lambda_hi = 2.0 * lambda_lo;
    double s_hi = spent(lambda_hi, x);
    guard = 0;
    while (s_hi > target && guard++ < 2000) {
        lambda_lo = lambda_hi;
        s_lo = s_hi;
        lambda_hi *= 2.0;
        s_hi = spent(lambda_hi, x);
    }

    const double slack = 1e-9 * (std::abs(s_lo) + target);
    if (s_hi > s_lo + slack)
        throw std::logic_error(
            "dual_power_search: spent power failed to decrease in the dual");

    double lambda = 0.5 * (lambda_lo + lambda_hi);
    double s = spent(lambda, x);
    res.budget_met = std::abs(s - target) <= opts.bisection_tolerance * target;
    for (int step = 1; step <= opts.max_bisection_steps && !res.budget_met;
         ++step) {
        res.bisection_steps = step;
        if (s > target) {
            if (s > s_lo + slack)
                throw std::logic_error(
                    "dual_power_search: spent power failed to decrease in the dual");
            lambda_lo = lambda;
            s_lo = s;
        } else {
            if (s < s_hi - slack)
                throw std::logic_error(
                    "dual_power_search: spent power failed to decrease in the dual");
            lambda_hi = lambda;
            s_hi = s;
        }
        lambda = 0.5 * (lambda_lo + lambda_hi);
        s = spent(lambda, x);
        res.budget_met = std::abs(s - target) <= opts.bisection_tolerance * target;
    }

    // Land exactly on the budget surface; the roots move by at most the
    // bisection tolerance.
    for (Eigen::Index j : active) x(j) *= target / s;
    res.lambda = lambda;
    res.values = x;
    return res;
}

}  // namespace detail

/// Sensor-side dual search: minimizes the alpha part of the surrogate
/// subject to sum_j w_j alpha_j = p_t.
inline DualSearchResult golden_search_sensors(const MajorantCoeffs& mc,
                                              const Eigen::VectorXd& channel_powers,
                                              double p_t, const ScaOptions& opts) {
    return detail::dual_power_search(mc.a, mc.c, channel_powers, p_t, opts);
}

/// Relay-side dual search: minimizes the beta part of the surrogate
/// subject to sum_j beta_j = p_r.
inline DualSearchResult golden_search_relay(const MajorantCoeffs& mc, double p_r,
                                            const ScaOptions& opts) {
    return detail::dual_power_search(
        mc.b, mc.d, Eigen::VectorXd::Ones(mc.b.size()), p_r, opts);
}

/// Dual variables of one iteration: sensor-side and relay-side.
struct DualPair {
    double lambda_t = 0.0;
    double lambda_r = 0.0;
};

/// Iteration history: states[0] is the initial point; duals[k] belongs to
/// the step from states[k] to states[k+1].
struct ScaTrace {
    std::vector<ScaState> states;
    std::vector<DualPair> duals;
    bool converged = false;
    enum class StopReason { tolerance_met, max_iterations, stalled } stop_reason =
        StopReason::max_iterations;

    int iterations() const { return static_cast<int>(states.size()) - 1; }
};

struct StepResult {
    ScaState state;
    DualPair duals;
};

namespace detail {

inline void check_state_finite(const ScaState& st, const char* where) {
    if (std::isfinite(st.objective) && st.phi.allFinite() && st.rho.allFinite() &&
        st.alloc.alpha.allFinite() && st.alloc.beta.allFinite())
        return;
    std::ostringstream os;
    os << where << ": non-finite state at iteration " << st.iteration
       << " (objective " << st.objective << ", |alpha| "
       << st.alloc.alpha.norm() << ", |beta| " << st.alloc.beta.norm() << ")";
    throw std::runtime_error(os.str());
}

}  // namespace detail

/// One surrogate minimization: builds the separable surrogate at `state`,
/// solves both budgeted subproblems, and evaluates the new allocation.
/// If round-off in the dual search would raise the objective, the previous
/// allocation is kept (the step degenerates to a fixed point).
inline StepResult sca_step(const PowerProblem& p, const Budgets& budgets,
                           const ScaState& state, const ScaOptions& opts) {
    const MajorantCoeffs mc = majorant_coeffs(state, p.coeffs);
    const DualSearchResult rs =
        golden_search_sensors(mc, p.channel_powers, budgets.p_t, opts);
    const DualSearchResult rr = golden_search_relay(mc, budgets.p_r, opts);

    Allocation next;
    next.alpha = rs.values.cwiseMax(opts.floor);
    next.beta = rr.values.cwiseMax(opts.floor);

    StepResult out;
    out.duals = {rs.lambda, rr.lambda};
    out.state = detail::state_at(p, next, state.iteration + 1);
    detail::check_state_finite(out.state, "sca_step");
    if (out.state.objective > state.objective) {
        out.state = state;
        out.state.iteration = state.iteration + 1;
    }
    return out;
}

/// Budget-uniform allocation: alpha_j = p_t / (M w_j), beta_j = p_r / M.
inline Allocation uniform_allocation(const Eigen::VectorXd& channel_powers,
                                     const Budgets& budgets) {
    const Eigen::Index m = channel_powers.size();
    require(m >= 1, "uniform_allocation: at least one channel required");
    require((channel_powers.array() > 0.0).all(),
            "uniform_allocation: channel powers must be positive");
    Allocation alloc;
    alloc.alpha = budgets.p_t / static_cast<double>(m) *
                  channel_powers.cwiseInverse();
    alloc.beta = Eigen::VectorXd::Constant(m, budgets.p_r / static_cast<double>(m));
    return alloc;
}

struct OptimizeResult {
    Allocation alloc;
    ScaTrace trace;
};

/// Joint sensor/relay power allocation by successive convex surrogates.
/// The objective sequence is nonincreasing; iteration stops when the
/// relative decrease falls to opts.epsilon, when progress stalls at
/// round-off level, or at opts.max_iterations.
inline OptimizeResult optimize(const PowerProblem& p, const Budgets& budgets,
                               const ScaOptions& opts = {}) {
    Allocation init;
    if (opts.initialization) {
        init = *opts.initialization;
        check_allocation(init, p.size());
        require(feasible(init, p.channel_powers, budgets),
                "optimize: initialization exceeds a power budget");
    } else {
        init = uniform_allocation(p.channel_powers, budgets);
    }
    init.alpha = init.alpha.cwiseMax(opts.floor);
    init.beta = init.beta.cwiseMax(opts.floor);

    OptimizeResult res;
    res.trace.states.push_back(detail::state_at(p, init, 0));
    detail::check_state_finite(res.trace.states.front(), "optimize");

    int stall_count = 0;
    for (int k = 0; k < opts.max_iterations; ++k) {
        StepResult step = sca_step(p, budgets, res.trace.states.back(), opts);
        const double prev = res.trace.states.back().objective;
        res.trace.states.push_back(std::move(step.state));
        res.trace.duals.push_back(step.duals);
        const double cur = res.trace.states.back().objective;
        const double rel = prev > 0.0 ? (prev - cur) / prev : 0.0;
        if (rel <= opts.epsilon) {
            res.trace.converged = true;
            res.trace.stop_reason = ScaTrace::StopReason::tolerance_met;
            break;
        }
        stall_count = (rel < 1e-14) ? stall_count + 1 : 0;
        if (stall_count >= 2) {
            res.trace.stop_reason = ScaTrace::StopReason::stalled;
            break;
        }
    }
    res.alloc = res.trace.states.back().alloc;
    return res;
}

/// Direct-link problem: phi_j = gain_j alpha_j / noise_j, no relay stage.
struct OneHopProblem {
    Eigen::MatrixXd psi;
    Eigen::MatrixXd phi;
    Eigen::VectorXd gain;
    Eigen::VectorXd noise;
    Eigen::VectorXd channel_powers;
    double residual_trace = 0.0;

    Eigen::Index size() const { return channel_powers.size(); }
};

inline OneHopProblem make_one_hop_problem(const JointMoments& m,
                                          const Eigen::VectorXd& gain,
                                          const Eigen::VectorXd& noise) {
    require(gain.size() == m.channel_count() && noise.size() == m.channel_count(),
            "make_one_hop_problem: one gain and noise per channel required");
    require((gain.array() > 0.0).all() && (noise.array() > 0.0).all(),
            "make_one_hop_problem: gains and noises must be positive");
    OneHopProblem p;
    const PsiPhi pp = psi_phi(m);
    p.psi = pp.psi;
    p.phi = pp.phi;
    p.gain = gain;
    p.noise = noise;
    p.channel_powers = channel_powers(m);
    p.residual_trace = (m.cov_x - m.cov_xy * pp.psi).trace();
    return p;
}

inline Eigen::VectorXd one_hop_phi(const OneHopProblem& p,
                                   const Eigen::VectorXd& alpha) {
    require(alpha.size() == p.size(), "one_hop_phi: allocation size mismatch");
    require((alpha.array() >= 0.0).all(), "one_hop_phi: powers must be nonnegative");
    return p.gain.cwiseProduct(alpha).cwiseQuotient(p.noise);
}

inline double one_hop_objective(const OneHopProblem& p,
                                const Eigen::VectorXd& alpha) {
    return objective_value(p.psi, p.phi, one_hop_phi(p, alpha));
}

inline double one_hop_mse(const OneHopProblem& p, const Eigen::VectorXd& alpha) {
    return p.residual_trace + one_hop_objective(p, alpha);
}

inline Eigen::VectorXd one_hop_uniform(const OneHopProblem& p, double p_t) {
    require(p_t > 0.0, "one_hop_uniform: budget must be positive");
    return p_t / static_cast<double>(p.size()) * p.channel_powers.cwiseInverse();
}

struct OneHopResult {
    Eigen::VectorXd alpha;
    ScaTrace trace;
};

namespace detail {

inline ScaState one_hop_state_at(const OneHopProblem& p,
                                 const Eigen::VectorXd& alpha, int iteration) {
    ScaState st;
    st.alloc.alpha = alpha;
    st.alloc.beta = Eigen::VectorXd();
    st.iteration = iteration;
    st.phi = one_hop_phi(p, alpha);
    Eigen::MatrixXd s = p.phi;
    s.diagonal() += st.phi;
    SpdSolver solver(s, "one-hop state: shifted precision");
    Eigen::MatrixXd b = solver.solve(p.psi);
    st.objective = (p.psi.array() * b.array()).sum();
    st.rho.resize(p.size());
    for (Eigen::Index j = 0; j < p.size(); ++j)
        st.rho(j) = st.phi(j) * st.phi(j) * b.row(j).squaredNorm();
    return st;
}

}  // namespace detail

/// Direct-link allocator.  The surrogate is sum_j rho_j noise_j/(gain_j a_j),
/// whose budgeted minimizer is closed-form:
///   alpha_j = sqrt(rho_j noise_j / (gain_j lambda w_j)),
///   lambda = (sum_j sqrt(rho_j noise_j w_j / gain_j) / p_t)^2.
inline OneHopResult one_hop_optimize(const OneHopProblem& p, double p_t,
                                     const ScaOptions& opts = {}) {
    require(p_t > 0.0, "one_hop_optimize: budget must be positive");
    Eigen::VectorXd alpha = one_hop_uniform(p, p_t).cwiseMax(opts.floor);

    OneHopResult res;
    res.trace.states.push_back(detail::one_hop_state_at(p, alpha, 0));
    detail::check_state_finite(res.trace.states.front(), "one_hop_optimize");

    int stall_count = 0;
    for (int k = 0; k < opts.max_iterations; ++k) {
        const ScaState& st = res.trace.states.back();
        double floor_budget = 0.0, ksum = 0.0;
        Eigen::VectorXd kj = Eigen::VectorXd::Zero(p.size());
        for (Eigen::Index j = 0; j < p.size(); ++j) {
            if (st.rho(j) > 0.0) {
                kj(j) = std::sqrt(st.rho(j) * p.noise(j) * p.channel_powers(j) /
                                  p.gain(j));
                ksum += kj(j);
            } else {
                floor_budget += p.channel_powers(j) * opts.floor;
            }
        }
        Eigen::VectorXd next = Eigen::VectorXd::Constant(p.size(), opts.floor);
        DualPair duals;
        if (ksum > 0.0) {
            const double target = p_t - floor_budget;
            require(target > 0.0, "one_hop_optimize: floor consumes the budget");
            const double sqrt_lambda = ksum / target;
            duals.lambda_t = sqrt_lambda * sqrt_lambda;
            for (Eigen::Index j = 0; j < p.size(); ++j)
                if (st.rho(j) > 0.0)
                    next(j) = kj(j) / (p.channel_powers(j) * sqrt_lambda);
        } else {
            next = one_hop_uniform(p, p_t);
        }
        ScaState ns = detail::one_hop_state_at(p, next.cwiseMax(opts.floor),
                                               st.iteration + 1);
        detail::check_state_finite(ns, "one_hop_optimize");
        if (ns.objective > st.objective) {
            ns = st;
            ns.iteration = st.iteration + 1;
        }
        const double prev = st.objective;
        res.trace.states.push_back(std::move(ns));
        res.trace.duals.push_back(duals);
        const double cur = res.trace.states.back().objective;
        const double rel = prev > 0.0 ? (prev - cur) / prev : 0.0;
        if (rel <= opts.epsilon) {
            res.trace.converged = true;
            res.trace.stop_reason = ScaTrace::StopReason::tolerance_met;
            break;
        }
        stall_count = (rel < 1e-14) ? stall_count + 1 : 0;
        if (stall_count >= 2) {
            res.trace.stop_reason = ScaTrace::StopReason::stalled;
            break;
        }
    }
    res.alpha = res.trace.states.back().alloc.alpha;
    return res;
}

}  // namespace relaypower
