#pragma once

#include <span>

#include "pvsizing/model.hpp"

namespace pvsizing {

struct SimStepResult {
  double soc_after = 0.0;
  double spill = 0.0;    // energy that could not be stored (exported)
  double deficit = 0.0;  // energy the fuel cell had to supply
};

// One step of the saturated, rate-limited battery:
//   C+ = retention * soc_prev + a*y - x
//   soc_after = clamp(C+, max(lo*C, soc_prev - R*C), min(hi*C, soc_prev + R*C))
// with the clipped energy booked as spill (above) or deficit (below).
// Throws InvalidState when soc_prev lies outside [alpha_lo*C, alpha_hi*C].
SimStepResult step(double soc_prev, double a, double y, double x, double capacity,
                   const BatteryParams& params);

struct SimulationResult {
  Trajectory trajectory;
  double original_cost = 0.0;
};

// Runs the greedy physical policy over the whole horizon at fixed sizing and
// prices the outcome with the original (saturation) objective. In Community
// mode `areas` holds one entry per household and the net injection is pooled.
SimulationResult simulate(std::span<const double> areas, double capacity, const SizingProblemSpec& spec);

}  // namespace pvsizing
