#pragma once

#include <iosfwd>
#include <map>

#include "transit/trainer/episode.hpp"

namespace transit::trainer {

struct TrainerConfig {
  int episodes = 300;
  int updates_per_episode = 1;
  std::uint64_t seed = 1;
  agents::AgentSpec agent;
  ScenarioConfig scenario;  // training defaults sample the sigma ranges
  double divergence_guard = 1e6;
  bool decay_noise = true;
  int trajectory_sample_every = 60;

  void validate() const;
};

struct TrainCurvePoint {
  int episode = 0;
  double mean_reward = 0.0;
  double critic_loss = 0.0;
  double mean_aht_s = 0.0;
};

// Mean meta weights over the tau grid, bucketed by event count; sampled
// from replayed decision graphs at the end of training.
struct MetaWeightProfile {
  std::map<int, Eigen::VectorXd> mean_weight_by_count;
  Eigen::VectorXd midpoints;
};

struct TrainResult {
  std::vector<TrainCurvePoint> curves;
  MetaWeightProfile meta_profile;  // empty unless the agent learns weights
  std::int64_t total_updates = 0;
};

// Rollout/update loop: one episode per iteration, then
// `updates_per_episode` (critic, actor[, meta]) triples once the stored
// experience count exceeds the threshold. Aborts if the critic loss
// passes the divergence guard.
TrainResult train(const TrainerConfig& cfg, const EpisodeSetup& setup,
                  agents::AgentRuntime& runtime,
                  std::ostream* progress = nullptr);

}  // namespace transit::trainer
