#include <catch2/catch_amalgamated.hpp>

#include "relaypower/gaussian.hpp"
#include "relaypower/rng.hpp"

using namespace relaypower;

namespace {

JointMoments two_sensor_moments() {
    GaussianBelief prior(Eigen::VectorXd::Constant(1, 1.0),
                         Eigen::MatrixXd::Constant(1, 1, 1.0));
    Eigen::MatrixXd g(2, 1);
    g << 1.0, 2.0;
    SensorNetwork net(g, Eigen::MatrixXd::Identity(2, 2));
    return observation_moments(prior, net);
}

}  // namespace

TEST_CASE("observation moments of a two-sensor scalar model") {
    const JointMoments m = two_sensor_moments();
    REQUIRE(m.mean_y(0) == 1.0);
    REQUIRE(m.mean_y(1) == 2.0);
    Eigen::MatrixXd expected(2, 2);
    expected << 2.0, 2.0, 2.0, 5.0;
    REQUIRE((m.cov_y - expected).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(m.cov_xy(0, 0) == 1.0);
    REQUIRE(m.cov_xy(0, 1) == 2.0);
}

TEST_CASE("channel power adds variance and squared mean") {
    const JointMoments m = two_sensor_moments();
    REQUIRE(channel_power(m, 0) == 3.0);
    REQUIRE(channel_power(m, 1) == 9.0);
    REQUIRE_THROWS_AS(channel_power(m, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(channel_power(m, -1), std::invalid_argument);
}

TEST_CASE("mmse estimate at the prior-predicted observation is the prior mean") {
    const JointMoments m = two_sensor_moments();
    const Eigen::VectorXd xhat = mmse_estimate(m, m.mean_y);
    REQUIRE(std::abs(xhat(0) - m.mean_x(0)) < 1e-14);
}

TEST_CASE("posterior covariance of two unit-gain sensors") {
    GaussianBelief prior(Eigen::VectorXd::Constant(1, 0.0),
                         Eigen::MatrixXd::Constant(1, 1, 1.0));
    Eigen::MatrixXd g(2, 1);
    g << 1.0, 1.0;
    SensorNetwork net(g, Eigen::MatrixXd::Identity(2, 2));
    const JointMoments m = observation_moments(prior, net);
    const Eigen::MatrixXd post = posterior_cov_direct(m);
    REQUIRE(std::abs(post(0, 0) - 1.0 / 3.0) < 1e-14);
    REQUIRE(std::abs(mse_trace(post) - 1.0 / 3.0) < 1e-14);
}

TEST_CASE("posterior never exceeds the prior and is symmetric PSD") {
    RngStream rng(42, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.engine()() % 3);
        const int mm = 1 + static_cast<int>(rng.engine()() % 5);
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
        GaussianBelief prior(rng.normal_vector(n),
                             a * a.transpose() +
                                 0.1 * Eigen::MatrixXd::Identity(n, n));
        Eigen::MatrixXd g(mm, n);
        for (int i = 0; i < mm; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
        SensorNetwork net(g, Eigen::MatrixXd::Identity(mm, mm));
        const JointMoments m = observation_moments(prior, net);
        const Eigen::MatrixXd post = posterior_cov_direct(m);
        REQUIRE((post - post.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(post);
        REQUIRE(es.eigenvalues().minCoeff() > -1e-10);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gap(prior.cov - post);
        REQUIRE(gap.eigenvalues().minCoeff() > -1e-10);
    }
}

TEST_CASE("uncorrelated observation leaves the prior untouched") {
    JointMoments m;
    m.mean_x = Eigen::VectorXd::Constant(2, 0.5);
    m.mean_y = Eigen::VectorXd::Zero(3);
    m.cov_x = Eigen::MatrixXd::Identity(2, 2) * 1.5;
    m.cov_y = Eigen::MatrixXd::Identity(3, 3);
    m.cov_xy = Eigen::MatrixXd::Zero(2, 3);
    const Eigen::MatrixXd post = posterior_cov_direct(m);
    REQUIRE((post - m.cov_x).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("monte carlo error of the mmse estimator matches the posterior trace") {
    RngStream rng(7, 0);
    GaussianBelief prior((Eigen::VectorXd(2) << 1.0, -1.0).finished(),
                         (Eigen::MatrixXd(2, 2) << 2.0, 0.5, 0.5, 1.0).finished());
    Eigen::MatrixXd g(3, 2);
    g << 1.0, 0.3, -0.5, 1.2, 0.8, 0.8;
    SensorNetwork net(g, Eigen::MatrixXd::Identity(3, 3));
    const JointMoments m = observation_moments(prior, net);
    const double analytic = mse_trace(posterior_cov_direct(m));

    const Eigen::MatrixXd lx = psd_sqrt(prior.cov);
    const long samples = 200000;
    double mean = 0.0, m2 = 0.0;
    for (long s = 0; s < samples; ++s) {
        const Eigen::VectorXd x = prior.mean + lx * rng.normal_vector(2);
        const Eigen::VectorXd y = g * x + rng.normal_vector(3);
        const double err = (x - mmse_estimate(m, y)).squaredNorm();
        const double delta = err - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (err - mean);
    }
    const double se = std::sqrt(m2 / static_cast<double>(samples - 1) /
                                static_cast<double>(samples));
    REQUIRE(std::abs(mean - analytic) < 3.0 * se);
}

TEST_CASE("invalid inputs are rejected by name") {
    REQUIRE_THROWS_AS(GaussianBelief(Eigen::VectorXd::Zero(2),
                                     (Eigen::MatrixXd(2, 2) << 1.0, 2.0, 2.0, 1.0)
                                         .finished()),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(GaussianBelief(Eigen::VectorXd::Zero(2),
                                     Eigen::MatrixXd::Identity(3, 3)),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(
        SensorNetwork(Eigen::MatrixXd::Identity(2, 2),
                      Eigen::MatrixXd::Zero(2, 2)),
        std::invalid_argument);

    GaussianBelief prior(Eigen::VectorXd::Zero(1),
                         Eigen::MatrixXd::Identity(1, 1));
    SensorNetwork net(Eigen::MatrixXd::Identity(2, 2).leftCols(1),
                      Eigen::MatrixXd::Identity(2, 2));
    const JointMoments m = observation_moments(prior, net);
    REQUIRE_THROWS_AS(mmse_estimate(m, Eigen::VectorXd::Zero(3)),
                      std::invalid_argument);
}

TEST_CASE("singular observation covariance raises a numerical error") {
    JointMoments m;
    m.mean_x = Eigen::VectorXd::Zero(1);
    m.mean_y = Eigen::VectorXd::Zero(2);
    m.cov_x = Eigen::MatrixXd::Identity(1, 1);
    m.cov_y = Eigen::MatrixXd::Ones(2, 2);  // rank one
    m.cov_xy = Eigen::MatrixXd::Zero(1, 2);
    REQUIRE_THROWS_MATCHES(
        mmse_estimate(m, Eigen::VectorXd::Zero(2)), std::runtime_error,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("condition")));
}
