#pragma once

#include <Eigen/Dense>

#include <string>

#include "relaypower/numeric.hpp"

namespace relaypower {

/// Gaussian prior over the parameter vector: mean and covariance.
/// Construction validates symmetry and positive semidefiniteness.
struct GaussianBelief {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    GaussianBelief(Eigen::VectorXd mean_in, Eigen::MatrixXd cov_in)
        : mean(std::move(mean_in)), cov(std::move(cov_in)) {
        require(mean.size() >= 1, "GaussianBelief: mean must be non-empty");
        require(cov.rows() == mean.size() && cov.cols() == mean.size(),
                "GaussianBelief: covariance must be n-by-n for an n-vector mean");
        check_psd(cov, "GaussianBelief covariance");
        cov = symmetrized(cov);
    }

    Eigen::Index dim() const { return mean.size(); }
};

/// Linear observation model y = G x + n with n ~ N(0, R).
/// R must be symmetric positive definite (every channel carries noise).
struct SensorNetwork {
    Eigen::MatrixXd gain;       // M x N
    Eigen::MatrixXd noise_cov;  // M x M

    SensorNetwork(Eigen::MatrixXd gain_in, Eigen::MatrixXd noise_cov_in)
        : gain(std::move(gain_in)), noise_cov(std::move(noise_cov_in)) {
        require(gain.rows() >= 1 && gain.cols() >= 1,
                "SensorNetwork: gain matrix must be non-empty");
        require(noise_cov.rows() == gain.rows() && noise_cov.cols() == gain.rows(),
                "SensorNetwork: noise covariance must be M-by-M");
        check_symmetric(noise_cov, "SensorNetwork noise covariance");
        noise_cov = symmetrized(noise_cov);
        Eigen::LLT<Eigen::MatrixXd> llt(noise_cov);
        require(llt.info() == Eigen::Success,
                "SensorNetwork noise covariance must be positive definite");
    }

    Eigen::Index channels() const { return gain.rows(); }
    Eigen::Index states() const { return gain.cols(); }
};

/// First and second moments of the joint distribution of (x, y).
/// Fields follow the usual block layout: cov_xy is the N x M cross block.
struct JointMoments {
    Eigen::VectorXd mean_x;  // N
    Eigen::VectorXd mean_y;  // M
    Eigen::MatrixXd cov_x;   // N x N
    Eigen::MatrixXd cov_y;   // M x M
    Eigen::MatrixXd cov_xy;  // N x M

    Eigen::Index state_dim() const { return mean_x.size(); }
    Eigen::Index channel_count() const { return mean_y.size(); }
};

/// Moments of (x, y) under the linear model: mean_y = G mean_x,
/// cov_y = G C G^T + R, cov_xy = C G^T.
inline JointMoments observation_moments(const GaussianBelief& prior,
                                        const SensorNetwork& net) {
    require(net.states() == prior.dim(),
            "observation_moments: gain column count must match prior dimension");
    JointMoments m;
    m.mean_x = prior.mean;
    m.mean_y = net.gain * prior.mean;
    m.cov_x = prior.cov;
    m.cov_y = symmetrized(net.gain * prior.cov * net.gain.transpose() + net.noise_cov);
    m.cov_xy = prior.cov * net.gain.transpose();
    return m;
}

/// Mean power of channel j: E[y_j^2] = var(y_j) + mean(y_j)^2.
inline double channel_power(const JointMoments& m, Eigen::Index j) {
    require(j >= 0 && j < m.channel_count(),
            "channel_power: channel index out of range");
    return m.cov_y(j, j) + m.mean_y(j) * m.mean_y(j);
}

inline Eigen::VectorXd channel_powers(const JointMoments& m) {
    Eigen::VectorXd w(m.channel_count());
    for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = channel_power(m, j);
    return w;
}

/// Posterior mean of x given an observed y: mean_x + C_XY C_Y^{-1} (z - mean_y).
inline Eigen::VectorXd mmse_estimate(const JointMoments& m,
                                     const Eigen::VectorXd& z) {
    require(z.size() == m.channel_count(),
            "mmse_estimate: observation length must match channel count");
    SpdSolver solver(m.cov_y, "mmse_estimate: observation covariance");
    return m.mean_x + m.cov_xy * solver.solve(z - m.mean_y);
}

/// Posterior covariance C_X - C_XY C_Y^{-1} C_YX.
inline Eigen::MatrixXd posterior_cov_direct(const JointMoments& m) {
    SpdSolver solver(m.cov_y, "posterior_cov_direct: observation covariance");
    Eigen::MatrixXd u = solver.solve(Eigen::MatrixXd(m.cov_xy.transpose()));
    return symmetrized(m.cov_x - m.cov_xy * u);
}

/// Total mean-square error of the posterior: the covariance trace.
inline double mse_trace(const Eigen::MatrixXd& posterior_cov) {
    return posterior_cov.trace();
}

}  // namespace relaypower
