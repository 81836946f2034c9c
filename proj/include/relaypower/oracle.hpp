#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>

#include "relaypower/gaussian.hpp"
#include "relaypower/numeric.hpp"
#include "relaypower/relay.hpp"

namespace relaypower {
namespace oracle {

/// Resolution of the exhaustive budget-surface scan.
struct GridSpec {
    int resolution;

    explicit GridSpec(int resolution_in) : resolution(resolution_in) {
        require(resolution >= 10, "GridSpec: resolution must be at least 10");
    }
};

struct GridResult {
    Allocation alloc;
    double mse = std::numeric_limits<double>::infinity();
};

namespace detail {

inline void consider(const JointMoments& m, const RelaySpec& spec,
                     const Allocation& alloc, GridResult& best) {
    const double t = posterior_mse_gain_form(m, spec, alloc).trace;
    if (t < best.mse) {
        best.mse = t;
        best.alloc = alloc;
    }
}

}  // namespace detail

/// Exhaustive scan of allocations on the budget surface, evaluating the
/// posterior through the gain-and-noise form only, never through the code
/// paths under test.  Cost grows as resolution^(2(M-1)); supported for
/// M <= 3 channels.
inline GridResult grid_search_mse(const JointMoments& m, const RelaySpec& spec,
                                  const Budgets& budgets, const GridSpec& grid) {
    const Eigen::Index n = spec.size();
    require(n == m.channel_count(),
            "grid_search_mse: relay size must match channel count");
    require(n <= 3, "grid_search_mse: supported for at most 3 channels");

    GridResult best;
    const Eigen::VectorXd& w = spec.channel_powers;
    if (n == 1) {
        Allocation alloc;
        alloc.alpha = Eigen::VectorXd::Constant(1, budgets.p_t / w(0));
        alloc.beta = Eigen::VectorXd::Constant(1, budgets.p_r);
        detail::consider(m, spec, alloc, best);
        return best;
    }

    const int r = grid.resolution;
    const double den = static_cast<double>(r + 1);
    Allocation alloc;
    alloc.alpha.resize(n);
    alloc.beta.resize(n);
    if (n == 2) {
        for (int i = 1; i <= r; ++i) {
            const double fa = i / den;
            alloc.alpha << fa * budgets.p_t / w(0), (1.0 - fa) * budgets.p_t / w(1);
            for (int j = 1; j <= r; ++j) {
                const double fb = j / den;
                alloc.beta << fb * budgets.p_r, (1.0 - fb) * budgets.p_r;
                detail::consider(m, spec, alloc, best);
            }
        }
        return best;
    }

    // n == 3: interior nodes of the fraction simplex on each side.
    for (int i1 = 1; i1 <= r - 1; ++i1)
        for (int i2 = 1; i2 <= r - i1; ++i2) {
            const double f1 = i1 / den, f2 = i2 / den, f3 = 1.0 - f1 - f2;
            alloc.alpha << f1 * budgets.p_t / w(0), f2 * budgets.p_t / w(1),
                f3 * budgets.p_t / w(2);
            for (int j1 = 1; j1 <= r - 1; ++j1)
                for (int j2 = 1; j2 <= r - j1; ++j2) {
                    const double g1 = j1 / den, g2 = j2 / den, g3 = 1.0 - g1 - g2;
                    alloc.beta << g1 * budgets.p_r, g2 * budgets.p_r,
                        g3 * budgets.p_r;
                    detail::consider(m, spec, alloc, best);
                }
        }
    return best;
}

/// Central-difference gradient with per-coordinate steps
/// h_i = rel_step * (1 + |x_i|).
inline Eigen::VectorXd fd_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double rel_step = 1e-5) {
    require(rel_step > 0.0, "fd_gradient: step must be positive");
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x, xm = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = rel_step * (1.0 + std::abs(x(i)));
        xp(i) = x(i) + h;
        xm(i) = x(i) - h;
        g(i) = (f(xp) - f(xm)) / (2.0 * h);
        xp(i) = x(i);
        xm(i) = x(i);
    }
    return g;
}

/// Central-difference Jacobian, one column per coordinate.
inline Eigen::MatrixXd fd_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double rel_step = 1e-5) {
    require(rel_step > 0.0, "fd_jacobian: step must be positive");
    Eigen::VectorXd fx = f(x);
    Eigen::MatrixXd jac(fx.size(), x.size());
    Eigen::VectorXd xp = x, xm = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = rel_step * (1.0 + std::abs(x(i)));
        xp(i) = x(i) + h;
        xm(i) = x(i) - h;
        jac.col(i) = (f(xp) - f(xm)) / (2.0 * h);
        xp(i) = x(i);
        xm(i) = x(i);
    }
    return jac;
}

}  // namespace oracle
}  // namespace relaypower
