#include "transit/scenario/scenario.hpp"

#include <algorithm>
#include <stdexcept>

namespace transit::scenario {

void PerturbationSpec::validate() const {
  if (sigma_d < 0 || sigma_s < 0)
    throw std::invalid_argument("PerturbationSpec: sigmas must be >= 0");
}

void AnomalySpec::validate(double horizon_s) const {
  if (kind == AnomalyKind::Interruption && (factor <= 0 || factor > 1))
    throw std::invalid_argument("AnomalySpec: factor must be in (0,1]");
  if (extra_pax < 0)
    throw std::invalid_argument("AnomalySpec: extra_pax must be >= 0");
  if (window_start_s < 0 || window_end_s > horizon_s ||
      window_start_s >= window_end_s)
    throw std::invalid_argument("AnomalySpec: window outside horizon");
}

double sample_demand_scale(Rng& rng, double sigma_d) {
  if (sigma_d < 0) throw std::invalid_argument("sigma_d must be >= 0");
  if (sigma_d == 0) return 1.0;
  return std::max(0.0, rng.normal(1.0, sigma_d));
}

double sample_speed_scale(Rng& rng, double sigma_s) {
  if (sigma_s < 0) throw std::invalid_argument("sigma_s must be >= 0");
  if (sigma_s == 0) return 1.0;
  return std::max(0.1, rng.normal(1.0, sigma_s));
}

namespace {

std::vector<int> resolve_targets(sim::SimState& state, const AnomalySpec& spec,
                                 int universe) {
  std::vector<int> targets = spec.targets;
  if (targets.empty() && spec.random_targets > 0) {
    std::vector<int> pool(universe);
    for (int i = 0; i < universe; ++i) pool[i] = i;
    // partial Fisher-Yates with the scenario stream
    const int k = std::min<int>(spec.random_targets, universe);
    for (int i = 0; i < k; ++i) {
      const int j =
          i + static_cast<int>(state.rngs.scenario.below(universe - i));
      std::swap(pool[i], pool[j]);
    }
    targets.assign(pool.begin(), pool.begin() + k);
    std::sort(targets.begin(), targets.end());
  }
  return targets;
}

}  // namespace

void apply_interruption(sim::SimState& state, const AnomalySpec& spec) {
  spec.validate(state.cfg.horizon_s);
  const auto targets =
      resolve_targets(state, spec, static_cast<int>(state.buses.size()));
  if (targets.empty())
    throw std::invalid_argument("apply_interruption: empty target set");
  for (int id : targets) {
    if (id < 0 || id >= static_cast<int>(state.buses.size()))
      throw std::invalid_argument("apply_interruption: unknown bus id");
    state.interruptions.push_back(
        {id, spec.factor, spec.window_start_s, spec.window_end_s});
  }
}

void apply_demand_surge(sim::SimState& state, const AnomalySpec& spec) {
  spec.validate(state.cfg.horizon_s);
  const auto targets =
      resolve_targets(state, spec, state.route.n_stops());
  for (int idx : targets) {
    if (idx < 0 || idx >= state.route.n_stops())
      throw std::invalid_argument("apply_demand_surge: unknown stop");
    state.surges.push_back(
        {idx, spec.extra_pax, spec.window_start_s, spec.window_end_s});
  }
}

}  // namespace transit::scenario
