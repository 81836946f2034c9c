#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "relaypower/gaussian.hpp"
#include "relaypower/numeric.hpp"

namespace relaypower {

/// One sensor-to-relay-to-fusion-center channel.
///   h_sr     power gain of the sensor-to-relay hop
///   h_rd     power gain of the relay-to-destination hop
///   sigma_sr noise power added at the relay
///   sigma_rd noise power added at the destination
struct ChannelLink {
    double h_sr;
    double h_rd;
    double sigma_sr;
    double sigma_rd;

    ChannelLink(double h_sr_in, double h_rd_in, double sigma_sr_in,
                double sigma_rd_in)
        : h_sr(h_sr_in), h_rd(h_rd_in), sigma_sr(sigma_sr_in), sigma_rd(sigma_rd_in) {
        require(h_sr > 0.0 && h_rd > 0.0, "ChannelLink: hop gains must be positive");
        require(sigma_sr > 0.0 && sigma_rd > 0.0,
                "ChannelLink: noise powers must be positive");
    }
};

/// Relayed network description: one link per observation channel plus the
/// mean channel powers E[y_j^2] that scale the transmit side.
struct RelaySpec {
    std::vector<ChannelLink> links;
    Eigen::VectorXd channel_powers;

    RelaySpec(std::vector<ChannelLink> links_in, Eigen::VectorXd channel_powers_in)
        : links(std::move(links_in)), channel_powers(std::move(channel_powers_in)) {
        require(!links.empty(), "RelaySpec: at least one link required");
        require(channel_powers.size() == static_cast<Eigen::Index>(links.size()),
                "RelaySpec: one channel power per link required");
        require((channel_powers.array() > 0.0).all(),
                "RelaySpec: channel powers must be strictly positive");
    }

    Eigen::Index size() const { return channel_powers.size(); }
};

/// Sum power budgets: p_t for the sensors, p_r for the relay.
struct Budgets {
    double p_t;
    double p_r;

    Budgets(double p_t_in, double p_r_in) : p_t(p_t_in), p_r(p_r_in) {
        require(p_t > 0.0 && p_r > 0.0, "Budgets: budgets must be positive");
    }
};

/// Per-channel power factors: alpha on the sensor side, beta at the relay.
struct Allocation {
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
};

inline void check_allocation(const Allocation& alloc, Eigen::Index m) {
    require(alloc.alpha.size() == m && alloc.beta.size() == m,
            "Allocation: alpha and beta must have one entry per channel");
    require((alloc.alpha.array() >= 0.0).all() && (alloc.beta.array() >= 0.0).all(),
            "Allocation: power factors must be nonnegative");
}

inline double sensor_power_used(const Allocation& alloc,
                                const Eigen::VectorXd& channel_powers) {
    return alloc.alpha.dot(channel_powers);
}

inline double relay_power_used(const Allocation& alloc) {
    return alloc.beta.sum();
}

inline bool feasible(const Allocation& alloc, const Eigen::VectorXd& channel_powers,
                     const Budgets& budgets, double rel_tol = 1e-9) {
    if (alloc.alpha.size() != channel_powers.size() ||
        alloc.beta.size() != channel_powers.size())
        return false;
    if (!(alloc.alpha.array() >= 0.0).all() || !(alloc.beta.array() >= 0.0).all())
        return false;
    return sensor_power_used(alloc, channel_powers) <= budgets.p_t * (1.0 + rel_tol) &&
           relay_power_used(alloc) <= budgets.p_r * (1.0 + rel_tol);
}

/// Coefficients of the per-channel SNR-like ratio
///   phi(alpha, beta) = p alpha beta / (q alpha + r beta + sigma).
struct PhiCoefficients {
    double p;
    double q;
    double r;
    double sigma;
};

/// phi coefficients of one link:
///   p = h_sr h_rd, q = h_sr sigma_rd w, r = h_rd sigma_sr, sigma = sigma_sr sigma_rd
/// where w is the mean channel power.  The relay noise power enters r and
/// sigma because the relay's normalization divides it out of the forwarded
/// signal; with sigma_sr = 1 the coefficients reduce to the unit-noise form.
inline PhiCoefficients phi_coefficients(const ChannelLink& link,
                                        double channel_power) {
    require(channel_power > 0.0, "phi_coefficients: channel power must be positive");
    return {link.h_sr * link.h_rd, link.h_sr * link.sigma_rd * channel_power,
            link.h_rd * link.sigma_sr, link.sigma_sr * link.sigma_rd};
}

inline std::vector<PhiCoefficients> phi_coefficients(const RelaySpec& spec) {
    std::vector<PhiCoefficients> out;
    out.reserve(static_cast<std::size_t>(spec.size()));
    for (Eigen::Index j = 0; j < spec.size(); ++j)
        out.push_back(phi_coefficients(spec.links[static_cast<std::size_t>(j)],
                                       spec.channel_powers(j)));
    return out;
}

inline double phi_value(double alpha, double beta, const PhiCoefficients& c) {
    require(alpha >= 0.0 && beta >= 0.0, "phi_value: powers must be nonnegative");
    if (alpha == 0.0 || beta == 0.0) return 0.0;
    return c.p * alpha * beta / (c.q * alpha + c.r * beta + c.sigma);
}

inline Eigen::VectorXd phi_vector(const RelaySpec& spec, const Allocation& alloc) {
    check_allocation(alloc, spec.size());
    Eigen::VectorXd phi(spec.size());
    const auto coeffs = phi_coefficients(spec);
    for (Eigen::Index j = 0; j < spec.size(); ++j)
        phi(j) = phi_value(alloc.alpha(j), alloc.beta(j),
                           coeffs[static_cast<std::size_t>(j)]);
    return phi;
}

/// Diagonal end-to-end amplitude gain of the relayed channel, entry j:
///   sqrt(h_rd h_sr beta alpha / (h_sr w alpha + sigma_sr)).
inline Eigen::MatrixXd effective_gain(const RelaySpec& spec,
                                      const Allocation& alloc) {
    check_allocation(alloc, spec.size());
    Eigen::VectorXd d(spec.size());
    for (Eigen::Index j = 0; j < spec.size(); ++j) {
        const ChannelLink& l = spec.links[static_cast<std::size_t>(j)];
        const double a = alloc.alpha(j), b = alloc.beta(j);
        const double denom = l.h_sr * spec.channel_powers(j) * a + l.sigma_sr;
        d(j) = std::sqrt(l.h_rd * l.h_sr * b * a / denom);
    }
    return d.asDiagonal();
}

/// Diagonal covariance of the total noise seen at the destination, entry j:
///   h_rd beta sigma_sr / (h_sr w alpha + sigma_sr) + sigma_rd.
inline Eigen::MatrixXd total_noise_cov(const RelaySpec& spec,
                                       const Allocation& alloc) {
    check_allocation(alloc, spec.size());
    Eigen::VectorXd d(spec.size());
    for (Eigen::Index j = 0; j < spec.size(); ++j) {
        const ChannelLink& l = spec.links[static_cast<std::size_t>(j)];
        const double a = alloc.alpha(j), b = alloc.beta(j);
        const double denom = l.h_sr * spec.channel_powers(j) * a + l.sigma_sr;
        d(j) = l.h_rd * b * l.sigma_sr / denom + l.sigma_rd;
    }
    return d.asDiagonal();
}

/// Posterior covariance together with its trace (the total MSE).
struct PosteriorMse {
    double trace;
    Eigen::MatrixXd cov;
};

/// Whitened cross matrix Psi = C_Y^{-1} C_YX and precision Phi = C_Y^{-1}.
struct PsiPhi {
    Eigen::MatrixXd psi;  // M x N
    Eigen::MatrixXd phi;  // M x M
};

inline PsiPhi psi_phi(const JointMoments& m) {
    SpdSolver solver(m.cov_y, "psi_phi: observation covariance");
    PsiPhi out;
    out.psi = solver.solve(Eigen::MatrixXd(m.cov_xy.transpose()));
    out.phi = symmetrized(solver.inverse());
    return out;
}

/// Reduction of the posterior error attributable to the relayed channel,
/// as a function of the per-channel ratios phi:
///   value = trace(Psi^T (Phi + diag(phi))^{-1} Psi).
inline double objective_value(const Eigen::MatrixXd& psi, const Eigen::MatrixXd& phi,
                              const Eigen::VectorXd& phi_diag) {
    require(phi_diag.size() == psi.rows() && phi.rows() == psi.rows(),
            "objective_value: dimension mismatch");
    require((phi_diag.array() >= 0.0).all(),
            "objective_value: phi entries must be nonnegative");
    Eigen::MatrixXd s = phi;
    s.diagonal() += phi_diag;
    SpdSolver solver(s, "objective_value: shifted precision");
    Eigen::MatrixXd b = solver.solve(psi);
    return (psi.array() * b.array()).sum();
}

/// Posterior covariance for given per-channel ratios phi, split form:
///   C = (C_X - C_XY C_Y^{-1} C_YX) + Psi^T (Phi + diag(phi))^{-1} Psi.
inline PosteriorMse mse_from_phi(const JointMoments& m,
                                 const Eigen::VectorXd& phi_diag) {
    require(phi_diag.size() == m.channel_count(),
            "mse_from_phi: one phi entry per channel required");
    require((phi_diag.array() >= 0.0).all(),
            "mse_from_phi: phi entries must be nonnegative");
    const PsiPhi pp = psi_phi(m);
    Eigen::MatrixXd residual = symmetrized(m.cov_x - m.cov_xy * pp.psi);
    Eigen::MatrixXd s = pp.phi;
    s.diagonal() += phi_diag;
    SpdSolver solver(s, "mse_from_phi: shifted precision");
    Eigen::MatrixXd b = solver.solve(pp.psi);
    PosteriorMse out;
    out.cov = symmetrized(residual + pp.psi.transpose() * b);
    out.trace = out.cov.trace();
    return out;
}

/// Posterior covariance under the relayed channel, phi-diagonal form.
inline PosteriorMse posterior_mse(const JointMoments& m, const RelaySpec& spec,
                                  const Allocation& alloc) {
    require(spec.size() == m.channel_count(),
            "posterior_mse: relay size must match channel count");
    return mse_from_phi(m, phi_vector(spec, alloc));
}

/// Posterior covariance computed through the end-to-end gain and noise
/// matrices:  C = C_X - C_XY H (H C_Y H + C_w)^{-1} H C_YX.
/// Slower and used as an independent cross-check of posterior_mse.
inline PosteriorMse posterior_mse_gain_form(const JointMoments& m,
                                            const RelaySpec& spec,
                                            const Allocation& alloc) {
    require(spec.size() == m.channel_count(),
            "posterior_mse_gain_form: relay size must match channel count");
    const Eigen::MatrixXd h = effective_gain(spec, alloc);
    const Eigen::MatrixXd cw = total_noise_cov(spec, alloc);
    Eigen::MatrixXd cz = symmetrized(h * m.cov_y * h + cw);
    SpdSolver solver(cz, "posterior_mse_gain_form: received covariance");
    Eigen::MatrixXd t = h * m.cov_xy.transpose();  // M x N
    Eigen::MatrixXd u = solver.solve(t);
    PosteriorMse out;
    out.cov = symmetrized(m.cov_x - t.transpose() * u);
    out.trace = out.cov.trace();
    return out;
}

}  // namespace relaypower
