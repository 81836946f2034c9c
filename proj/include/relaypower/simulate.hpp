#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "relaypower/numeric.hpp"
#include "relaypower/relay.hpp"
#include "relaypower/rng.hpp"
#include "relaypower/scenario.hpp"

namespace relaypower {

struct EmpiricalMse {
    double mean = 0.0;
    double std_err = 0.0;
    long samples = 0;
};

/// Monte Carlo estimate of the squared estimation error under a fixed
/// allocation: draws (x, y), pushes y through the relayed channel with
/// explicit relay and destination noise, applies the posterior-mean
/// estimator matched to the allocation, and averages ||x - xhat||^2.
inline EmpiricalMse simulate_realization(const ProblemData& pd,
                                         const Allocation& alloc, RngStream& rng,
                                         long samples) {
    require(samples >= 2, "simulate_realization: at least two samples required");
    const JointMoments& m = pd.moments;
    const Eigen::Index mm = m.channel_count(), n = m.state_dim();
    check_allocation(alloc, mm);

    // Signal chain per channel: z = amp (sens y + w_r) + w_d.
    Eigen::VectorXd sens(mm), amp(mm), wr_sd(mm), wd_sd(mm);
    for (Eigen::Index j = 0; j < mm; ++j) {
        const ChannelLink& l = pd.relay.links[static_cast<std::size_t>(j)];
        const double a = alloc.alpha(j), b = alloc.beta(j);
        sens(j) = std::sqrt(l.h_sr * a);
        amp(j) = std::sqrt(l.h_rd * b /
                           (l.h_sr * pd.relay.channel_powers(j) * a + l.sigma_sr));
        wr_sd(j) = std::sqrt(l.sigma_sr);
        wd_sd(j) = std::sqrt(l.sigma_rd);
    }

    // Estimator gain matched to the allocation.
    const Eigen::VectorXd h = amp.cwiseProduct(sens);
    Eigen::MatrixXd cz = symmetrized(h.asDiagonal() * m.cov_y * h.asDiagonal());
    for (Eigen::Index j = 0; j < mm; ++j)
        cz(j, j) += amp(j) * amp(j) * wr_sd(j) * wr_sd(j) + wd_sd(j) * wd_sd(j);
    SpdSolver solver(cz, "simulate_realization: received covariance");
    const Eigen::MatrixXd kt =
        solver.solve(Eigen::MatrixXd(h.asDiagonal() * m.cov_xy.transpose()));
    const Eigen::VectorXd mean_z = h.cwiseProduct(m.mean_y);

    // One square root of the joint covariance of (x, y) drives the draws.
    Eigen::MatrixXd joint(n + mm, n + mm);
    joint.topLeftCorner(n, n) = m.cov_x;
    joint.topRightCorner(n, mm) = m.cov_xy;
    joint.bottomLeftCorner(mm, n) = m.cov_xy.transpose();
    joint.bottomRightCorner(mm, mm) = m.cov_y;
    const Eigen::MatrixXd ljoint = psd_sqrt(joint);

    double mean = 0.0, m2 = 0.0;
    Eigen::VectorXd x(n), y(mm), z(mm), xhat(n), xy(n + mm);
    for (long s = 0; s < samples; ++s) {
        xy = ljoint * rng.normal_vector(n + mm);
        x = m.mean_x + xy.head(n);
        y = m.mean_y + xy.tail(mm);
        for (Eigen::Index j = 0; j < mm; ++j)
            z(j) = amp(j) * (sens(j) * y(j) + wr_sd(j) * rng.normal()) +
                   wd_sd(j) * rng.normal();
        xhat = m.mean_x + kt.transpose() * (z - mean_z);
        const double err = (x - xhat).squaredNorm();
        const double delta = err - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (err - mean);
    }

    EmpiricalMse out;
    out.mean = mean;
    out.samples = samples;
    out.std_err = std::sqrt(m2 / static_cast<double>(samples - 1) /
                            static_cast<double>(samples));
    return out;
}

}  // namespace relaypower
