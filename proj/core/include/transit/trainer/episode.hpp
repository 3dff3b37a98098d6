#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "transit/agents/agent.hpp"
#include "transit/env/env.hpp"
#include "transit/metrics/metrics.hpp"
#include "transit/scenario/scenario.hpp"
#include "transit/sim/simulation.hpp"

namespace transit::trainer {

struct ScenarioConfig {
  double sigma_d = 0.0;
  double sigma_s = 0.0;
  bool sample_sigmas = false;  // training draws sigmas per episode
  double sigma_d_lo = 0.0;
  double sigma_d_hi = 3.0;
  double sigma_s_lo = 0.0;
  double sigma_s_hi = 0.3;
  std::vector<scenario::AnomalySpec> anomalies;
};

struct EpisodeSetup {
  sim::RouteSpec route;
  sim::DemandMatrix demand;
  sim::SimConfig cfg;
  ScenarioConfig scenario;
  double max_hold_s = 180.0;
  double reward_w = 0.2;
};

struct DecisionLogEntry {
  int bus_id = 0;
  int stop_index = 0;
  double time_s = 0.0;
  env::Observation obs;
  double action = 0.0;
  double hold_s = 0.0;
  bool rewarded = false;
  double reward = 0.0;
  double cv2_at_reward = 0.0;
};

struct TrajectorySample {
  double time_s;
  int bus_id;
  double position_km;
  sim::BusPhase phase;
  int occupancy;
};

struct EpisodeLog {
  std::uint64_t seed = 0;
  double sigma_d = 0.0, sigma_s = 0.0;
  double p_d = 1.0, p_s = 1.0;

  std::vector<DecisionLogEntry> decisions;
  std::vector<TrajectorySample> trajectory;
  std::vector<double> cv2_times_s;
  std::vector<double> cv2_values;

  // per-agent experiences assembled during the run (complete tuples only)
  std::vector<std::pair<int, env::Experience>> experiences;

  sim::EpisodeStats stats;
  metrics::MetricsReport report;
  double mean_reward = 0.0;
  double mean_cv2 = 0.0;  // time-average while >= 2 buses active
  double episode_end_s = 0.0;
};

struct EpisodeOptions {
  bool explore = false;
  int trajectory_sample_every = 1;  // ticks
};

// One seeded rollout. Decision points follow arrivals: observe, act,
// hold; the previous decision's experience is completed at the next
// arrival with its reward and event graph. The episode stops early once
// every bus has finished.
EpisodeLog run_episode(const agents::AgentRuntime& agent,
                       const EpisodeSetup& setup, std::uint64_t seed,
                       const EpisodeOptions& opts = {});

}  // namespace transit::trainer
