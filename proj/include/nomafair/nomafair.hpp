#pragma once

// Umbrella header: optimal power allocation for fairness in superposition
// (NOMA) downlink, with orthogonal-access baselines and a Monte Carlo oracle.

#include "nomafair/baselines.hpp"
#include "nomafair/maxmin_solver.hpp"
#include "nomafair/model.hpp"
#include "nomafair/montecarlo.hpp"
#include "nomafair/noma_core.hpp"
#include "nomafair/ordered_channel.hpp"
#include "nomafair/outage_solver.hpp"
#include "nomafair/rng.hpp"
