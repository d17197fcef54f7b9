#pragma once

// Numerical laboratory for the 2D log-gas behind fully correlated
// lowest-Landau-level states: Gibbs sampling of the plasma, ground-state
// configuration search, the Thomas-Fermi screening construction, and the
// incompressibility / trap-energy verdicts built on top of them.

#include "laughlin/autocorr.hpp"
#include "laughlin/configuration.hpp"
#include "laughlin/errors.hpp"
#include "laughlin/exclusion.hpp"
#include "laughlin/geometry.hpp"
#include "laughlin/grid.hpp"
#include "laughlin/histogram.hpp"
#include "laughlin/incompressibility.hpp"
#include "laughlin/minimize.hpp"
#include "laughlin/params.hpp"
#include "laughlin/plasma.hpp"
#include "laughlin/prefactor.hpp"
#include "laughlin/rng.hpp"
#include "laughlin/sampler.hpp"
#include "laughlin/tf.hpp"
