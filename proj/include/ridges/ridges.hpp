#pragma once

// Anisotropic particle-interaction engine for stationary ridge patterns:
// periodic geometry, orientation fields, interaction force laws, the
// N-particle integrator, pattern diagnostics, and run/experiment plumbing.

#include "ridges/analysis.hpp"
#include "ridges/config.hpp"
#include "ridges/direction_field.hpp"
#include "ridges/errors.hpp"
#include "ridges/experiments.hpp"
#include "ridges/force_model.hpp"
#include "ridges/geometry.hpp"
#include "ridges/io.hpp"
#include "ridges/simulator.hpp"
#include "ridges/version.hpp"
