#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "relaypower/config.hpp"
#include "relaypower/oracle.hpp"
#include "relaypower/scenario.hpp"

using namespace relaypower;

TEST_CASE("free-space gain at the reference geometry") {
    // 200 m hop, 0.125 m wavelength, reference power ratio 1e7.
    const double h = channel_gain(200.0, 0.125, 1e7);
    REQUIRE(std::abs(h - 2.4736617e-2) < 1e-8);
    REQUIRE(channel_gain(400.0, 0.125, 1e7) == h / 4.0);
    REQUIRE(channel_gain(100.0, 0.125, 1e7) > h);
    REQUIRE_THROWS_AS(channel_gain(0.0, 0.125, 1e7), std::invalid_argument);
}

TEST_CASE("measurement map and jacobian on the first axis") {
    const Eigen::Vector3d x(5.0, 0.0, 0.0), s(0.0, 0.0, 0.0);
    const Eigen::Vector3d z = measurement_map(x, s);
    REQUIRE(z(0) == 5.0);
    REQUIRE(z(1) == 0.0);
    REQUIRE(z(2) == 0.0);
    const Eigen::Matrix3d j = measurement_jacobian(x, s, 0);
    Eigen::Matrix3d expected;
    expected << 1.0, 0.0, 0.0, 0.0, 0.2, 0.0, 0.0, 0.0, 0.2;
    REQUIRE((j - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("analytic jacobian matches finite differences") {
    const Eigen::Vector3d s(2.0, -1.0, 0.5);
    const Eigen::Vector3d x(7.0, 3.0, 4.0);
    const Eigen::Matrix3d j = measurement_jacobian(x, s, 1);
    const Eigen::MatrixXd jf = oracle::fd_jacobian(
        [&](const Eigen::VectorXd& p) {
            return Eigen::VectorXd(
                measurement_map(Eigen::Vector3d(p), s));
        },
        x, 1e-6);
    REQUIRE((j - jf).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("singular geometry names the offending sensor") {
    const Eigen::Vector3d s(0.0, 0.0, 0.0);
    REQUIRE_THROWS_MATCHES(
        measurement_jacobian(Eigen::Vector3d(0.0, 5.0, 0.0), s, 3),
        std::invalid_argument,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("sensor 3")));
    REQUIRE_THROWS_AS(measurement_jacobian(Eigen::Vector3d(0.0, 0.0, 2.0), s, 0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(measurement_jacobian(s, s, 0), std::invalid_argument);
}

TEST_CASE("scalar placement stays on the first axis inside the radius") {
    ScenarioConfig c = default_config(TargetKind::scalar);
    c.sensor_count = 8;
    RngStream rng(123, 0);
    const Placement p = place_sensors(rng, c);
    REQUIRE(p.sensors.size() == 8);
    for (const auto& s : p.sensors) {
        REQUIRE(std::abs(s.x()) <= c.placement_radius);
        REQUIRE(s.y() == 0.0);
        REQUIRE(s.z() == 0.0);
    }
    REQUIRE(p.relay.x() == c.two_hop_distance);
    REQUIRE(p.fc.x() == c.one_hop_distance);
}

TEST_CASE("vector placement sits on a sphere around the prior mean") {
    ScenarioConfig c = default_config(TargetKind::vector);
    c.sensor_count = 6;
    RngStream rng(124, 0);
    const Placement p = place_sensors(rng, c);
    const Eigen::Vector3d anchor = c.prior_mean.head<3>();
    for (const auto& s : p.sensors)
        REQUIRE(std::abs((s - anchor).norm() - c.placement_radius) < 1e-9);
    REQUIRE((p.relay - anchor).norm() == c.two_hop_distance);
    REQUIRE((p.fc - anchor).norm() == c.one_hop_distance);
}

TEST_CASE("permuted placement keeps the distance multiset fixed") {
    ScenarioConfig c = default_config(TargetKind::vector);
    c.sensor_count = 5;
    c.placement_mode = PlacementMode::permute;
    RngStream canon_rng(99, 0);
    const std::vector<Eigen::Vector3d> canonical =
        place_sensors(canon_rng, c).sensors;

    std::vector<double> first;
    for (int trial = 0; trial < 3; ++trial) {
        RngStream rng(99, 16 + static_cast<std::uint64_t>(trial));
        const Placement p = place_sensors(rng, c, &canonical);
        std::vector<double> d;
        for (const auto& s : p.sensors) d.push_back((s - p.relay).norm());
        std::sort(d.begin(), d.end());
        if (trial == 0) {
            first = d;
        } else {
            for (std::size_t i = 0; i < d.size(); ++i)
                REQUIRE(std::abs(d[i] - first[i]) < 1e-12);
        }
    }
}

TEST_CASE("scalar scenario shapes and channel powers") {
    ScenarioConfig c = default_config(TargetKind::scalar);
    RngStream rng(7, 0);
    const Placement placement = place_sensors(rng, c);
    const ProblemData pd = build_scalar_scenario(c, placement);
    REQUIRE(pd.moments.channel_count() == 10);
    REQUIRE(pd.moments.state_dim() == 1);
    REQUIRE(pd.relay.size() == 10);
    // Gain profile starts at 1 and ends at 2; unit prior and unit mean give
    // channel power 2 g^2 + 1.
    REQUIRE(std::abs(pd.relay.channel_powers(0) - 3.0) < 1e-12);
    REQUIRE(std::abs(pd.relay.channel_powers(9) - 9.0) < 1e-12);
    for (int j = 0; j < 10; ++j) {
        const ChannelLink& l = pd.relay.links[static_cast<std::size_t>(j)];
        REQUIRE(l.sigma_sr == c.relay_noise);
        REQUIRE(l.sigma_rd == c.fc_noise);
        REQUIRE(l.h_sr > 0.0);
    }
    // The relay sits closer than the fusion center, so each relayed hop has
    // more gain than the direct link.
    for (int j = 0; j < 10; ++j)
        REQUIRE(pd.relay.links[static_cast<std::size_t>(j)].h_sr >
                pd.one_hop_gain(j));
}

TEST_CASE("vector scenario expands each sensor into three channels") {
    ScenarioConfig c = default_config(TargetKind::vector);
    c.sensor_count = 4;
    RngStream rng(8, 0);
    const Placement placement = place_sensors(rng, c);
    const ProblemData pd = build_vector_scenario(c, placement);
    REQUIRE(pd.moments.channel_count() == 12);
    REQUIRE(pd.moments.state_dim() == 3);
    REQUIRE(pd.relay.size() == 12);
    // Channels of one sensor share the same hop gains.
    for (int s = 0; s < 4; ++s) {
        const auto& l0 = pd.relay.links[static_cast<std::size_t>(3 * s)];
        const auto& l2 = pd.relay.links[static_cast<std::size_t>(3 * s + 2)];
        REQUIRE(l0.h_sr == l2.h_sr);
        REQUIRE(l0.h_rd == l2.h_rd);
    }
}

TEST_CASE("fading scales hop gains but keeps the observation model") {
    ScenarioConfig c = default_config(TargetKind::scalar);
    c.fading = true;
    RngStream rng(9, 0);
    const Placement placement = place_sensors(rng, c);
    RngStream fading_a(9, 1), fading_b(9, 1), fading_c(9, 2);
    const ProblemData pa = build_scalar_scenario(c, placement, &fading_a);
    const ProblemData pb = build_scalar_scenario(c, placement, &fading_b);
    const ProblemData pc = build_scalar_scenario(c, placement, &fading_c);
    REQUIRE(pa.relay.links[0].h_sr == pb.relay.links[0].h_sr);
    REQUIRE(pa.relay.links[0].h_sr != pc.relay.links[0].h_sr);
    REQUIRE((pa.moments.cov_y - pc.moments.cov_y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("configuration validation catches bad settings") {
    ScenarioConfig c = default_config(TargetKind::scalar);
    c.p_t_grid = {};
    REQUIRE_THROWS_AS(validate_config(c), std::invalid_argument);
    c = default_config(TargetKind::scalar);
    c.p_t_grid = {0.5, 0.4};
    REQUIRE_THROWS_AS(validate_config(c), std::invalid_argument);
    c = default_config(TargetKind::scalar);
    c.placement_radius = 500.0;
    REQUIRE_THROWS_AS(validate_config(c), std::invalid_argument);
    c = default_config(TargetKind::scalar);
    c.prior_mean = Eigen::VectorXd::Zero(3);
    REQUIRE_THROWS_AS(validate_config(c), std::invalid_argument);
    c = default_config(TargetKind::vector);
    c.trials = 0;
    REQUIRE_THROWS_AS(validate_config(c), std::invalid_argument);
}
