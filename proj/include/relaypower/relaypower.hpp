#pragma once

// Umbrella header: MMSE estimation over relayed linear sensor networks,
// joint sensor/relay power allocation, and the Monte Carlo experiment
// drivers built on top of them.

#include "relaypower/config.hpp"
#include "relaypower/cubic.hpp"
#include "relaypower/gaussian.hpp"
#include "relaypower/numeric.hpp"
#include "relaypower/oracle.hpp"
#include "relaypower/relay.hpp"
#include "relaypower/rng.hpp"
#include "relaypower/scenario.hpp"
#include "relaypower/sca.hpp"
#include "relaypower/simulate.hpp"
#include "relaypower/sweep.hpp"
#include "relaypower/validate.hpp"
#include "relaypower/version.hpp"
