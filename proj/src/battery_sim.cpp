#include "pvsizing/battery_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pvsizing {

SimStepResult step(double soc_prev, double a, double y, double x, double capacity,
                   const BatteryParams& params) {
  const double lower = params.alpha_lo * capacity;
  const double upper = params.alpha_hi * capacity;
  const double slack = 1e-9 * (1.0 + capacity);
  if (capacity < 0.0 || soc_prev < lower - slack || soc_prev > upper + slack) {
    std::ostringstream os;
    os << "battery state " << soc_prev << " outside [" << lower << ", " << upper << "]";
    throw InvalidState(os.str());
  }
  const double unbounded = params.retention * soc_prev + a * y - x;
  const double floor = std::max(lower, soc_prev - params.rate_frac * capacity);
  const double ceiling = std::min(upper, soc_prev + params.rate_frac * capacity);
  SimStepResult r;
  r.soc_after = std::clamp(unbounded, floor, ceiling);
  r.spill = std::max(unbounded - r.soc_after, 0.0);
  r.deficit = std::max(r.soc_after - unbounded, 0.0);
  return r;
}

SimulationResult simulate(std::span<const double> areas, double capacity, const SizingProblemSpec& spec) {
  const std::size_t steps = spec.num_steps();
  if (areas.size() != spec.num_areas()) throw InvalidState("simulate: one PV area per decision variable");
  for (double a : areas) {
    if (a < 0.0 || a > spec.a_max) throw InvalidState("simulate: PV area outside [0, a_max]");
  }
  if (capacity < 0.0) throw InvalidState("simulate: negative capacity");

  const auto& p = spec.prices;
  SimulationResult out;
  Trajectory& t = out.trajectory;
  t.soc.resize(steps + 1);
  t.spill.resize(steps);
  t.deficit.resize(steps);
  t.soc[0] = spec.battery.init_frac * capacity;

  double cost = p.pi_b * capacity;
  for (double a : areas) cost += p.pi_pv * a;

  for (std::size_t k = 0; k < steps; ++k) {
    double generation = 0.0;
    double demand = 0.0;
    for (std::size_t i = 0; i < spec.households.size(); ++i) {
      const auto& h = spec.households[i];
      const double a = spec.mode == Mode::Individual ? areas[0] : areas[i];
      generation += a * h.pv_yield[k];
      demand += h.consumption[k];
    }
    const SimStepResult s = step(t.soc[k], 1.0, generation, demand, capacity, spec.battery);
    t.soc[k + 1] = s.soc_after;
    t.spill[k] = s.spill;
    t.deficit[k] = s.deficit;
    cost += p.pi_r * s.spill + p.pi_g * s.deficit;
  }
  out.original_cost = cost;
  return out;
}

}  // namespace pvsizing
