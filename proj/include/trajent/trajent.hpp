// trajent.hpp - umbrella header for the trajectory entanglement library.

#pragma once

#include "trajent/analytics.hpp"
#include "trajent/config.hpp"
#include "trajent/ensemble.hpp"
#include "trajent/entanglement.hpp"
#include "trajent/errors.hpp"
#include "trajent/lindblad.hpp"
#include "trajent/linalg.hpp"
#include "trajent/model.hpp"
#include "trajent/optimize.hpp"
#include "trajent/qj.hpp"
#include "trajent/qsd.hpp"
#include "trajent/random.hpp"
#include "trajent/state.hpp"
#include "trajent/stats.hpp"
#include "trajent/trajectory.hpp"
