#pragma once

#include <vector>

#include "transit/rng.hpp"
#include "transit/sim/types.hpp"

namespace transit::scenario {

// Episode-level demand/speed uncertainty. With both sigmas at zero a
// wrapped episode is bitwise identical to the base one.
struct PerturbationSpec {
  double sigma_d = 0.0;
  double sigma_s = 0.0;
  bool resample_per_episode = true;

  void validate() const;
};

enum class AnomalyKind { Interruption, DemandSurge };

struct AnomalySpec {
  AnomalyKind kind = AnomalyKind::Interruption;
  std::vector<int> targets;  // bus ids (interruption) or stop indices (surge)
  int random_targets = 0;    // draw this many targets if `targets` is empty
  double factor = 0.1;       // interruption speed multiplier, in (0, 1]
  int extra_pax = 0;         // surge injection per bus arrival
  double window_start_s = 0.0;
  double window_end_s = 0.0;

  void validate(double horizon_s) const;
};

// Demand scale p_d ~ N(1, sigma_d^2), clamped to keep rates physical.
double sample_demand_scale(Rng& rng, double sigma_d);

// Speed scale p_s ~ N(1, sigma_s^2), floored at 0.1 so buses keep moving
// outside explicit interruptions.
double sample_speed_scale(Rng& rng, double sigma_s);

// Installs a speed-multiplier window on the targeted buses; random targets
// are drawn from the in-service fleet with the state's scenario stream.
void apply_interruption(sim::SimState& state, const AnomalySpec& spec);

// Registers a passenger-injection window on the targeted stops.
void apply_demand_surge(sim::SimState& state, const AnomalySpec& spec);

}  // namespace transit::scenario
