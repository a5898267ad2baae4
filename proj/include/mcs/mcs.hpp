#pragma once

// Compressive measurement, recovery, and parameter estimation for
// manifold-modeled signals, with empirical certification of the accompanying
// embedding and accuracy bounds.

#include "mcs/adversarial.hpp"
#include "mcs/bounds.hpp"
#include "mcs/harness.hpp"
#include "mcs/linops.hpp"
#include "mcs/manifolds.hpp"
#include "mcs/recovery.hpp"
#include "mcs/rng.hpp"
