#include <catch2/catch_amalgamated.hpp>

#include "relaypower/relay.hpp"
#include "relaypower/rng.hpp"

using namespace relaypower;

namespace {

JointMoments simple_moments(const Eigen::MatrixXd& g) {
    GaussianBelief prior(Eigen::VectorXd::Constant(g.cols(), 1.0),
                         Eigen::MatrixXd::Identity(g.cols(), g.cols()));
    SensorNetwork net(g, Eigen::MatrixXd::Identity(g.rows(), g.rows()));
    return observation_moments(prior, net);
}

}  // namespace

TEST_CASE("phi coefficients of one link") {
    const ChannelLink link(2.0, 3.0, 1.0, 1.0);
    const PhiCoefficients c = phi_coefficients(link, 2.0);
    REQUIRE(c.p == 6.0);
    REQUIRE(c.q == 4.0);
    REQUIRE(c.r == 3.0);
    REQUIRE(c.sigma == 1.0);
    REQUIRE(phi_value(2.0, 1.0, c) == 1.0);
}

TEST_CASE("relay noise power scales the beta-side coefficient") {
    const ChannelLink link(2.0, 3.0, 2.0, 1.0);
    const PhiCoefficients c = phi_coefficients(link, 2.0);
    REQUIRE(c.r == 6.0);  // h_rd * sigma_sr
    REQUIRE(c.sigma == 2.0);
}

TEST_CASE("phi vanishes with either power and grows with both") {
    const PhiCoefficients c = phi_coefficients(ChannelLink(1.5, 0.8, 1.0, 2.0), 3.0);
    REQUIRE(phi_value(0.0, 1.0, c) == 0.0);
    REQUIRE(phi_value(1.0, 0.0, c) == 0.0);
    double prev = 0.0;
    for (double a = 0.5; a < 8.0; a *= 2.0) {
        const double v = phi_value(a, 1.0, c);
        REQUIRE(v > prev);
        prev = v;
    }
    prev = 0.0;
    for (double b = 0.5; b < 8.0; b *= 2.0) {
        const double v = phi_value(1.0, b, c);
        REQUIRE(v > prev);
        prev = v;
    }
}

TEST_CASE("unbounded relay power approaches the first-hop ratio") {
    const ChannelLink link(2.5, 0.7, 1.3, 1.0);
    const PhiCoefficients c = phi_coefficients(link, 2.0);
    const double limit = link.h_sr * 0.9 / link.sigma_sr;
    REQUIRE(std::abs(phi_value(0.9, 1e12, c) - limit) < 1e-9 * limit);
}

TEST_CASE("unit powers on unit links give unit phi at the fixed point") {
    // With h = sigma = 1 and channel power 2, alpha = beta = (3+sqrt(13))/2
    // solves phi(alpha, alpha) = 1.
    const PhiCoefficients c = phi_coefficients(ChannelLink(1.0, 1.0, 1.0, 1.0), 2.0);
    const double a = 0.5 * (3.0 + std::sqrt(13.0));
    REQUIRE(std::abs(phi_value(a, a, c) - 1.0) < 1e-12);
}

TEST_CASE("zero power reproduces the prior covariance") {
    const JointMoments m = simple_moments((Eigen::MatrixXd(2, 1) << 1.0, 2.0).finished());
    const PosteriorMse r = mse_from_phi(m, Eigen::VectorXd::Zero(2));
    REQUIRE((r.cov - m.cov_x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("both posterior forms agree on random instances") {
    RngStream rng(11, 0);
    for (int t = 0; t < 25; ++t) {
        const int n = 1 + static_cast<int>(rng.engine()() % 3);
        const int mm = 1 + static_cast<int>(rng.engine()() % 4);
        Eigen::MatrixXd g(mm, n);
        for (int i = 0; i < mm; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
        const JointMoments m = simple_moments(g);
        std::vector<ChannelLink> links;
        for (int j = 0; j < mm; ++j)
            links.emplace_back(0.2 + rng.uniform(0.0, 2.0),
                               0.2 + rng.uniform(0.0, 2.0),
                               0.5 + rng.uniform(0.0, 1.0),
                               0.5 + rng.uniform(0.0, 1.0));
        RelaySpec spec(links, channel_powers(m));
        Allocation alloc;
        alloc.alpha = Eigen::VectorXd::NullaryExpr(
            mm, [&](Eigen::Index) { return 0.05 + rng.uniform(0.0, 2.0); });
        alloc.beta = Eigen::VectorXd::NullaryExpr(
            mm, [&](Eigen::Index) { return 0.05 + rng.uniform(0.0, 2.0); });
        if (mm > 1) alloc.alpha(0) = 0.0;  // include a switched-off channel

        const PosteriorMse a = posterior_mse(m, spec, alloc);
        const PosteriorMse b = posterior_mse_gain_form(m, spec, alloc);
        REQUIRE(std::abs(a.trace - b.trace) <= 1e-10 * std::abs(b.trace));
        REQUIRE((a.cov - b.cov).cwiseAbs().maxCoeff() <=
                1e-10 * (1.0 + b.cov.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("posterior trace decreases when any phi entry grows") {
    const JointMoments m =
        simple_moments((Eigen::MatrixXd(3, 1) << 1.0, 1.5, 2.0).finished());
    Eigen::VectorXd phi = Eigen::VectorXd::Constant(3, 0.5);
    const double base = mse_from_phi(m, phi).trace;
    for (int j = 0; j < 3; ++j) {
        Eigen::VectorXd bumped = phi;
        bumped(j) += 0.25;
        REQUIRE(mse_from_phi(m, bumped).trace < base);
    }
}

TEST_CASE("posterior splits into residual plus removable part") {
    const JointMoments m =
        simple_moments((Eigen::MatrixXd(2, 2) << 1.0, 0.2, -0.4, 1.1).finished());
    const PsiPhi pp = psi_phi(m);
    const Eigen::VectorXd phi = (Eigen::VectorXd(2) << 0.7, 1.9).finished();
    const double residual = (m.cov_x - m.cov_xy * pp.psi).trace();
    const double total = residual + objective_value(pp.psi, pp.phi, phi);
    REQUIRE(std::abs(total - mse_from_phi(m, phi).trace) < 1e-12);
}

TEST_CASE("allocation and link validation") {
    const JointMoments m = simple_moments((Eigen::MatrixXd(2, 1) << 1.0, 2.0).finished());
    std::vector<ChannelLink> links(2, ChannelLink(1.0, 1.0, 1.0, 1.0));
    RelaySpec spec(links, channel_powers(m));
    Allocation bad;
    bad.alpha = Eigen::VectorXd::Constant(2, -0.1);
    bad.beta = Eigen::VectorXd::Constant(2, 1.0);
    REQUIRE_THROWS_AS(posterior_mse(m, spec, bad), std::invalid_argument);
    Allocation short_alloc;
    short_alloc.alpha = Eigen::VectorXd::Constant(1, 0.1);
    short_alloc.beta = Eigen::VectorXd::Constant(1, 0.1);
    REQUIRE_THROWS_AS(phi_vector(spec, short_alloc), std::invalid_argument);
    REQUIRE_THROWS_AS(ChannelLink(0.0, 1.0, 1.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(ChannelLink(1.0, 1.0, 0.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(Budgets(0.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(mse_from_phi(m, (Eigen::VectorXd(2) << -0.5, 1.0).finished()),
                      std::invalid_argument);
}

TEST_CASE("feasibility accounting") {
    const Eigen::VectorXd w = (Eigen::VectorXd(2) << 2.0, 4.0).finished();
    Allocation alloc;
    alloc.alpha = (Eigen::VectorXd(2) << 0.25, 0.125).finished();
    alloc.beta = (Eigen::VectorXd(2) << 1.0, 2.0).finished();
    REQUIRE(sensor_power_used(alloc, w) == 1.0);
    REQUIRE(relay_power_used(alloc) == 3.0);
    REQUIRE(feasible(alloc, w, Budgets(1.0, 3.0)));
    REQUIRE_FALSE(feasible(alloc, w, Budgets(0.99, 3.0)));
}
