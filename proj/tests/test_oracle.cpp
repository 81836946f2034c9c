#include <catch2/catch_amalgamated.hpp>

#include "relaypower/oracle.hpp"
#include "relaypower/rng.hpp"

using namespace relaypower;

namespace {

JointMoments moments_for(const Eigen::MatrixXd& g) {
    GaussianBelief prior(Eigen::VectorXd::Constant(g.cols(), 1.0),
                         Eigen::MatrixXd::Identity(g.cols(), g.cols()));
    SensorNetwork net(g, Eigen::MatrixXd::Identity(g.rows(), g.rows()));
    return observation_moments(prior, net);
}

}  // namespace

TEST_CASE("single-channel scan spends both budgets directly") {
    const JointMoments m = moments_for(Eigen::MatrixXd::Constant(1, 1, 2.0));
    RelaySpec spec({ChannelLink(1.0, 1.0, 1.0, 1.0)}, channel_powers(m));
    const Budgets budgets(0.9, 2.0);
    const oracle::GridResult r =
        oracle::grid_search_mse(m, spec, budgets, oracle::GridSpec(10));
    REQUIRE(std::abs(r.alloc.alpha(0) - 0.1) < 1e-15);
    REQUIRE(std::abs(r.alloc.beta(0) - 2.0) < 1e-15);
    REQUIRE(r.mse ==
            posterior_mse_gain_form(m, spec, r.alloc).trace);
}

TEST_CASE("correlated identical channels reward concentration") {
    // Both sensors read the same parameter, so their readings are
    // correlated and the second channel adds little; the global optimum
    // pushes everything onto one channel.  At that corner phi = 2/9 and
    // the variance is 1 - phi / (2 phi + 1) = 11/13.
    const JointMoments m =
        moments_for((Eigen::MatrixXd(2, 1) << 1.0, 1.0).finished());
    std::vector<ChannelLink> links(2, ChannelLink(1.0, 1.0, 1.0, 1.0));
    RelaySpec spec(links, channel_powers(m));
    const Budgets budgets(1.0, 4.0);
    const oracle::GridResult r =
        oracle::grid_search_mse(m, spec, budgets, oracle::GridSpec(40));
    Allocation sym;
    sym.alpha = Eigen::VectorXd::Constant(2, 0.5 / channel_power(m, 0));
    sym.beta = Eigen::VectorXd::Constant(2, 2.0);
    const double sym_mse = posterior_mse_gain_form(m, spec, sym).trace;
    const double corner_mse = 11.0 / 13.0;
    REQUIRE(r.mse < sym_mse);
    REQUIRE(r.mse >= corner_mse - 1e-12);
    const oracle::GridResult fine =
        oracle::grid_search_mse(m, spec, budgets, oracle::GridSpec(400));
    REQUIRE(fine.mse <= r.mse + 1e-15);
    REQUIRE(fine.mse <= corner_mse * 1.001);
}

TEST_CASE("scan stays on the budget surface") {
    const JointMoments m =
        moments_for((Eigen::MatrixXd(2, 1) << 1.0, 2.0).finished());
    std::vector<ChannelLink> links = {ChannelLink(0.5, 1.0, 1.0, 1.0),
                                      ChannelLink(2.0, 1.0, 1.0, 1.0)};
    RelaySpec spec(links, channel_powers(m));
    const Budgets budgets(1.3, 3.7);
    const oracle::GridResult r =
        oracle::grid_search_mse(m, spec, budgets, oracle::GridSpec(15));
    REQUIRE(std::abs(sensor_power_used(r.alloc, spec.channel_powers) - 1.3) <
            1e-12);
    REQUIRE(std::abs(relay_power_used(r.alloc) - 3.7) < 1e-12);
}

TEST_CASE("three-channel scan works and larger networks are rejected") {
    const JointMoments m3 =
        moments_for((Eigen::MatrixXd(3, 1) << 1.0, 1.5, 2.0).finished());
    std::vector<ChannelLink> links3(3, ChannelLink(1.0, 1.0, 1.0, 1.0));
    RelaySpec spec3(links3, channel_powers(m3));
    const oracle::GridResult r = oracle::grid_search_mse(
        m3, spec3, Budgets(1.0, 3.0), oracle::GridSpec(12));
    REQUIRE(r.mse < m3.cov_x.trace());

    const JointMoments m4 =
        moments_for((Eigen::MatrixXd(4, 1) << 1.0, 1.0, 1.0, 1.0).finished());
    std::vector<ChannelLink> links4(4, ChannelLink(1.0, 1.0, 1.0, 1.0));
    RelaySpec spec4(links4, channel_powers(m4));
    REQUIRE_THROWS_AS(oracle::grid_search_mse(m4, spec4, Budgets(1.0, 3.0),
                                              oracle::GridSpec(12)),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(oracle::GridSpec(5), std::invalid_argument);
}

TEST_CASE("finite differences recover a quadratic's gradient") {
    Eigen::MatrixXd a(3, 3);
    a << 2.0, 0.3, 0.0, 0.3, 1.5, -0.2, 0.0, -0.2, 1.0;
    const Eigen::VectorXd x0 = (Eigen::VectorXd(3) << 0.7, -1.2, 0.4).finished();
    const Eigen::VectorXd g = oracle::fd_gradient(
        [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(a * x); }, x0);
    REQUIRE((g - a * x0).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("finite differences recover a linear map's jacobian") {
    Eigen::MatrixXd a(2, 3);
    a << 1.0, -2.0, 0.5, 0.0, 3.0, 1.0;
    const Eigen::VectorXd x0 = (Eigen::VectorXd(3) << 0.1, 0.2, -0.3).finished();
    const Eigen::MatrixXd j = oracle::fd_jacobian(
        [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x); }, x0);
    REQUIRE((j - a).cwiseAbs().maxCoeff() < 1e-8);
}
