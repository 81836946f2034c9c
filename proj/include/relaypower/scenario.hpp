#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "relaypower/gaussian.hpp"
#include "relaypower/numeric.hpp"
#include "relaypower/relay.hpp"
#include "relaypower/rng.hpp"
#include "relaypower/sca.hpp"

namespace relaypower {

enum class TargetKind { scalar, vector };

/// Allocation strategies compared by the experiment driver.
enum class Method { two_hop_opt, two_hop_uniform, one_hop_opt, one_hop_uniform };

inline const std::vector<Method>& all_methods() {
    static const std::vector<Method> m = {Method::two_hop_opt,
                                          Method::two_hop_uniform,
                                          Method::one_hop_opt,
                                          Method::one_hop_uniform};
    return m;
}

inline std::string method_name(Method m) {
    switch (m) {
        case Method::two_hop_opt: return "two_hop_opt";
        case Method::two_hop_uniform: return "two_hop_uniform";
        case Method::one_hop_opt: return "one_hop_opt";
        case Method::one_hop_uniform: return "one_hop_uniform";
    }
    throw std::invalid_argument("method_name: unknown method");
}

inline Method method_from_string(const std::string& s) {
    for (Method m : all_methods())
        if (method_name(m) == s) return m;
    throw std::invalid_argument("unknown method '" + s + "'");
}

/// How sensor positions vary across Monte Carlo trials.
///   redraw   fresh positions every trial (default)
///   permute  one canonical draw, relabeled per trial; the multiset of
///            sensor-relay distances is then trial-invariant
enum class PlacementMode { redraw, permute };

/// Full description of one simulated experiment.
struct ScenarioConfig {
    TargetKind kind = TargetKind::scalar;
    int sensor_count = 10;
    Eigen::VectorXd prior_mean;
    Eigen::MatrixXd prior_cov;
    double wavelength = 0.125;
    double snr = 1e10;
    double one_hop_distance = 400.0;
    double two_hop_distance = 200.0;
    std::vector<double> p_t_grid = {0.1, 0.2, 0.3, 0.4, 0.5,
                                    0.6, 0.7, 0.8, 0.9, 1.0};
    double p_r = 5.0;
    long trials = 500;
    std::uint64_t seed = 1;
    double placement_radius = 20.0;
    PlacementMode placement_mode = PlacementMode::redraw;
    double sensor_noise = 1.0;
    double relay_noise = 1.0;
    double fc_noise = 1.0;
    bool fading = false;
    std::vector<Method> methods = all_methods();
    ScaOptions optimizer;
};

inline void validate_config(const ScenarioConfig& c) {
    require(c.sensor_count >= 1, "config: sensor_count must be at least 1");
    require(c.trials >= 1, "config: trials must be at least 1");
    require(c.wavelength > 0.0, "config: wavelength must be positive");
    require(c.snr > 0.0, "config: snr must be positive");
    require(c.one_hop_distance > 0.0 && c.two_hop_distance > 0.0,
            "config: distances must be positive");
    require(c.placement_radius > 0.0, "config: placement_radius must be positive");
    require(c.placement_radius < c.two_hop_distance,
            "config: placement_radius must be below the relay distance");
    require(c.p_r > 0.0, "config: p_r must be positive");
    require(!c.p_t_grid.empty(), "config: p_t_grid must be non-empty");
    double prev = 0.0;
    for (double p : c.p_t_grid) {
        require(p > prev, "config: p_t_grid must be positive and ascending");
        prev = p;
    }
    require(c.sensor_noise > 0.0 && c.relay_noise > 0.0 && c.fc_noise > 0.0,
            "config: noise powers must be positive");
    require(!c.methods.empty(), "config: at least one method required");
    const Eigen::Index dim = c.kind == TargetKind::scalar ? 1 : 3;
    require(c.prior_mean.size() == dim,
            "config: prior_mean dimension must match target kind");
    require(c.prior_cov.rows() == dim && c.prior_cov.cols() == dim,
            "config: prior_cov dimension must match target kind");
    require(c.optimizer.epsilon > 0.0 && c.optimizer.max_iterations >= 1,
            "config: optimizer settings out of range");
}

/// Free-space received-power gain of a hop of length d:
///   h = snr * (wavelength / (4 pi d))^2.
inline double channel_gain(double distance, double wavelength, double snr) {
    require(distance > 0.0, "channel_gain: distance must be positive");
    require(wavelength > 0.0, "channel_gain: wavelength must be positive");
    require(snr > 0.0, "channel_gain: snr must be positive");
    const double ratio = wavelength / (4.0 * std::numbers::pi * distance);
    return snr * ratio * ratio;
}

/// Node geometry of one trial.
struct Placement {
    std::vector<Eigen::Vector3d> sensors;
    Eigen::Vector3d relay;
    Eigen::Vector3d fc;
};

/// Draws sensor positions around the prior mean (vector targets) or the
/// origin (scalar targets): on a sphere of the placement radius for vector
/// targets, on a segment of that half-length along the first axis for
/// scalar ones.  Relay and fusion center sit at the configured distances
/// along the first axis.  In permute mode `canonical` supplies the
/// positions and only their order is randomized.
inline Placement place_sensors(RngStream& rng, const ScenarioConfig& c,
                               const std::vector<Eigen::Vector3d>* canonical =
                                   nullptr) {
    const std::size_t m = static_cast<std::size_t>(c.sensor_count);
    Eigen::Vector3d anchor = Eigen::Vector3d::Zero();
    if (c.kind == TargetKind::vector) anchor = c.prior_mean.head<3>();

    Placement p;
    p.sensors.resize(m);
    if (canonical) {
        require(canonical->size() == m,
                "place_sensors: canonical layout has wrong sensor count");
        const auto perm = rng.permutation(m);
        for (std::size_t i = 0; i < m; ++i) p.sensors[i] = (*canonical)[perm[i]];
    } else {
        for (std::size_t i = 0; i < m; ++i) {
            if (c.kind == TargetKind::scalar) {
                const double u = rng.uniform(-c.placement_radius, c.placement_radius);
                p.sensors[i] = anchor + Eigen::Vector3d(u, 0.0, 0.0);
            } else {
                Eigen::Vector3d dir;
                do {
                    dir = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
                } while (dir.norm() < 1e-6);
                p.sensors[i] = anchor + c.placement_radius * dir.normalized();
            }
        }
        const auto perm = rng.permutation(m);
        std::vector<Eigen::Vector3d> shuffled(m);
        for (std::size_t i = 0; i < m; ++i) shuffled[i] = p.sensors[perm[i]];
        p.sensors = std::move(shuffled);
    }
    p.relay = anchor + Eigen::Vector3d(c.two_hop_distance, 0.0, 0.0);
    p.fc = anchor + Eigen::Vector3d(c.one_hop_distance, 0.0, 0.0);
    return p;
}

/// Sensor reading of a 3-d target at x from a sensor at s, with d = x - s:
/// range, ratio of the second to the first offset component, and ratio of
/// the third component to the in-plane range.
inline Eigen::Vector3d measurement_map(const Eigen::Vector3d& x,
                                       const Eigen::Vector3d& sensor) {
    const Eigen::Vector3d d = x - sensor;
    const double planar = std::sqrt(d.x() * d.x() + d.y() * d.y());
    return {d.norm(), d.y() / d.x(), d.z() / planar};
}

/// Analytic Jacobian of measurement_map with respect to x.  Throws when the
/// geometry is singular (target on top of the sensor, zero first offset,
/// or zero in-plane range), naming the offending sensor.
inline Eigen::Matrix3d measurement_jacobian(const Eigen::Vector3d& x,
                                            const Eigen::Vector3d& sensor,
                                            int sensor_index) {
    const Eigen::Vector3d d = x - sensor;
    const double range = d.norm();
    const double planar = std::sqrt(d.x() * d.x() + d.y() * d.y());
    const auto fail = [&](const char* what) {
        std::ostringstream os;
        os << "measurement_jacobian: sensor " << sensor_index << ": " << what;
        throw std::invalid_argument(os.str());
    };
    if (range < 1e-9) fail("target coincides with the sensor");
    if (std::abs(d.x()) < 1e-9) fail("zero first offset component");
    if (planar < 1e-9) fail("zero in-plane range");

    Eigen::Matrix3d jac;
    jac.row(0) = d.transpose() / range;
    jac.row(1) << -d.y() / (d.x() * d.x()), 1.0 / d.x(), 0.0;
    const double p3 = planar * planar * planar;
    jac.row(2) << -d.z() * d.x() / p3, -d.z() * d.y() / p3, 1.0 / planar;
    return jac;
}

/// Everything the per-trial pipeline needs: moments of the observation,
/// the relayed-link description, and the direct-link alternative.
struct ProblemData {
    JointMoments moments;
    RelaySpec relay;
    Eigen::VectorXd one_hop_gain;
    Eigen::VectorXd one_hop_noise;
    Placement placement;
};

namespace detail {

/// Measurement-gain column for scalar targets.  The 10-sensor layout uses
/// the reference profile; other counts interpolate the same 1..2 ramp.
inline Eigen::VectorXd scalar_gain_profile(int m) {
    if (m == 10) {
        Eigen::VectorXd g(10);
        g << 1.00, 1.11, 1.22, 1.33, 1.44, 1.55, 1.66, 1.77, 1.88, 2.00;
        return g;
    }
    if (m == 1) return Eigen::VectorXd::Constant(1, 1.0);
    return Eigen::VectorXd::LinSpaced(m, 1.0, 2.0);
}

inline double maybe_fade(double h, RngStream* fading_rng) {
    return fading_rng ? h * fading_rng->exponential(1.0) : h;
}

inline ProblemData assemble(const ScenarioConfig& c, const Placement& placement,
                            const GaussianBelief& prior,
                            const Eigen::MatrixXd& gain, int rows_per_sensor,
                            RngStream* fading_rng) {
    SensorNetwork net(gain, c.sensor_noise * Eigen::MatrixXd::Identity(
                                                 gain.rows(), gain.rows()));
    JointMoments moments = observation_moments(prior, net);
    const Eigen::VectorXd w = channel_powers(moments);

    std::vector<ChannelLink> links;
    links.reserve(static_cast<std::size_t>(gain.rows()));
    Eigen::VectorXd oh_gain(gain.rows());
    for (int s = 0; s < c.sensor_count; ++s) {
        const Eigen::Vector3d& pos = placement.sensors[static_cast<std::size_t>(s)];
        const double d_sr = (pos - placement.relay).norm();
        const double d_rd = (placement.relay - placement.fc).norm();
        const double d_sd = (pos - placement.fc).norm();
        const double h_sr =
            maybe_fade(channel_gain(d_sr, c.wavelength, c.snr), fading_rng);
        const double h_rd =
            maybe_fade(channel_gain(d_rd, c.wavelength, c.snr), fading_rng);
        const double h_sd =
            maybe_fade(channel_gain(d_sd, c.wavelength, c.snr), fading_rng);
        for (int k = 0; k < rows_per_sensor; ++k) {
            links.emplace_back(h_sr, h_rd, c.relay_noise, c.fc_noise);
            oh_gain(s * rows_per_sensor + k) = h_sd;
        }
    }
    return ProblemData{std::move(moments), RelaySpec(std::move(links), w),
                       std::move(oh_gain),
                       Eigen::VectorXd::Constant(gain.rows(), c.fc_noise),
                       placement};
}

}  // namespace detail

/// Scalar-target scenario: M sensors observe one parameter through fixed
/// measurement gains; every sensor feeds one relayed channel.
inline ProblemData build_scalar_scenario(const ScenarioConfig& c,
                                         const Placement& placement,
                                         RngStream* fading_rng = nullptr) {
    require(c.kind == TargetKind::scalar,
            "build_scalar_scenario: config is not a scalar scenario");
    validate_config(c);
    require(placement.sensors.size() == static_cast<std::size_t>(c.sensor_count),
            "build_scalar_scenario: placement has wrong sensor count");
    GaussianBelief prior(c.prior_mean, c.prior_cov);
    const Eigen::MatrixXd gain = detail::scalar_gain_profile(c.sensor_count);
    return detail::assemble(c, placement, prior, gain, 1, fading_rng);
}

/// Vector-target scenario: each sensor reports three components (the
/// measurement map linearized at the prior mean), each forwarded on its own
/// relayed channel, so M sensors produce 3M channels.
inline ProblemData build_vector_scenario(const ScenarioConfig& c,
                                         const Placement& placement,
                                         RngStream* fading_rng = nullptr) {
    require(c.kind == TargetKind::vector,
            "build_vector_scenario: config is not a vector scenario");
    validate_config(c);
    require(placement.sensors.size() == static_cast<std::size_t>(c.sensor_count),
            "build_vector_scenario: placement has wrong sensor count");
    GaussianBelief prior(c.prior_mean, c.prior_cov);
    const Eigen::Vector3d x0 = c.prior_mean.head<3>();
    Eigen::MatrixXd gain(3 * c.sensor_count, 3);
    for (int s = 0; s < c.sensor_count; ++s)
        gain.middleRows<3>(3 * s) = measurement_jacobian(
            x0, placement.sensors[static_cast<std::size_t>(s)], s);
    return detail::assemble(c, placement, prior, gain, 3, fading_rng);
}

inline ProblemData build_scenario(const ScenarioConfig& c,
                                  const Placement& placement,
                                  RngStream* fading_rng = nullptr) {
    return c.kind == TargetKind::scalar
               ? build_scalar_scenario(c, placement, fading_rng)
               : build_vector_scenario(c, placement, fading_rng);
}

}  // namespace relaypower
