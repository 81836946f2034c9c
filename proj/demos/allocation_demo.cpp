// Minimal library walkthrough: build a three-sensor relayed network by
// hand, allocate power jointly, and compare against the uniform split.

#include <cstdio>

#include "relaypower/relaypower.hpp"

int main() {
    using namespace relaypower;

    // Scalar parameter with unit prior variance, three sensors with
    // different measurement gains, unit sensing noise.
    GaussianBelief prior(Eigen::VectorXd::Constant(1, 1.0),
                         Eigen::MatrixXd::Constant(1, 1, 1.0));
    Eigen::MatrixXd gain(3, 1);
    gain << 1.0, 1.5, 2.0;
    SensorNetwork net(gain, Eigen::MatrixXd::Identity(3, 3));
    JointMoments moments = observation_moments(prior, net);

    // Identical relayed links; the interesting structure is in the gains.
    std::vector<ChannelLink> links(3, ChannelLink(2.0, 2.0, 1.0, 1.0));
    RelaySpec spec(links, channel_powers(moments));
    Budgets budgets(1.0, 5.0);

    const PowerProblem problem = make_power_problem(moments, spec);
    const Allocation uniform = uniform_allocation(problem.channel_powers, budgets);
    const OptimizeResult opt = optimize(problem, budgets);

    std::printf("prior mse            %.6f\n", prior.cov.trace());
    std::printf("uniform split mse    %.6f\n", mse_of(problem, uniform));
    std::printf("optimized mse        %.6f  (%d iterations)\n",
                mse_of(problem, opt.alloc), opt.trace.iterations());
    for (int j = 0; j < 3; ++j)
        std::printf("channel %d: alpha %.4f  beta %.4f\n", j,
                    opt.alloc.alpha(j), opt.alloc.beta(j));
    return 0;
}
