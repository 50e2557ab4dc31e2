#pragma once

#include <cstdint>
#include <vector>

#include "pvsizing/data_io.hpp"
#include "pvsizing/model.hpp"

namespace testing {

// Prices rescaled to a horizon of `days` against a 334-day reference.
inline pvsizing::PriceSchedule horizon_prices(double pi_r, double days) {
  pvsizing::PriceSchedule p;
  p.pi_r = pi_r;
  return pvsizing::amortize(p, days);
}

inline pvsizing::SizingProblemSpec individual(const pvsizing::HouseholdSeries& h, double pi_r, double days) {
  pvsizing::SizingProblemSpec spec;
  spec.grid.num_steps = h.size();
  spec.households = {h};
  spec.prices = horizon_prices(pi_r, days);
  return spec;
}

inline pvsizing::SizingProblemSpec community(const std::vector<pvsizing::HouseholdSeries>& hh, double pi_r,
                                             double days) {
  pvsizing::SizingProblemSpec spec;
  spec.mode = pvsizing::Mode::Community;
  spec.grid.num_steps = hh.front().size();
  spec.households = hh;
  spec.prices = horizon_prices(pi_r, days);
  return spec;
}

inline pvsizing::SizingProblemSpec hand_instance() {
  pvsizing::SizingProblemSpec spec;
  spec.grid.num_steps = 4;
  spec.households = {{"h", {0.3, 0.3, 0.3, 0.3}, {0.5, 0.0, 0.0, 0.5}}};
  spec.battery.retention = 1.0;
  spec.battery.rate_frac = 1.0;
  return spec;
}

}  // namespace testing
