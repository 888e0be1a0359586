#pragma once

// Umbrella header for the weak-measurement toolkit.

#include "weakmeas/errors.hpp"
#include "weakmeas/hilbert.hpp"
#include "weakmeas/meter.hpp"
#include "weakmeas/monte_carlo.hpp"
#include "weakmeas/random.hpp"
#include "weakmeas/report.hpp"
#include "weakmeas/scenario.hpp"
#include "weakmeas/scenario_io.hpp"
#include "weakmeas/weak_values.hpp"
