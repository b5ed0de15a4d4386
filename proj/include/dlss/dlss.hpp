#pragma once

// Umbrella header for the corrected-DLSS structure-preserving solver.

#include "dlss/error.hpp"
#include "dlss/grid.hpp"
#include "dlss/functionals.hpp"
#include "dlss/penta.hpp"
#include "dlss/scheme.hpp"
#include "dlss/newton.hpp"
#include "dlss/simulation.hpp"
#include "dlss/experiments.hpp"
#include "dlss/checks.hpp"
#include "dlss/version.hpp"
