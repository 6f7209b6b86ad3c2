#ifndef STOCHPACK_STOCHPACK_HPP
#define STOCHPACK_STOCHPACK_HPP

// Umbrella header for the stochastic bin packing library.

#include "stochpack/bounds.hpp"
#include "stochpack/capacity.hpp"
#include "stochpack/experiment.hpp"
#include "stochpack/instances.hpp"
#include "stochpack/monte_carlo.hpp"
#include "stochpack/normal.hpp"
#include "stochpack/offline.hpp"
#include "stochpack/online.hpp"
#include "stochpack/planner.hpp"
#include "stochpack/random.hpp"
#include "stochpack/workload.hpp"

#endif
