#pragma once

#include <string>

#include "transit/trainer/episode.hpp"

namespace transit::trainer {

struct EvalCell {
  double sigma_d = 1.0;
  double sigma_s = 0.1;
  std::vector<scenario::AnomalySpec> anomalies;
  std::string anomaly_label = "none";
};

struct EvalCellResult {
  EvalCell cell;
  int n_seeds = 0;
  metrics::MetricsReport mean;  // treated means, deltas vs paired NC
  std::vector<metrics::MetricsReport> per_seed;
  std::vector<metrics::MetricsReport> per_seed_nc;
  double mean_cv2 = 0.0;
  double mean_cv2_nc = 0.0;
  std::vector<EpisodeLog> logs;     // kept only when requested
  std::vector<EpisodeLog> logs_nc;
};

struct EvalOptions {
  bool keep_logs = false;
  int trajectory_sample_every = 10;
};

// Paired evaluation: for every seed the no-control baseline runs with the
// exact same episode seed, hence the same scenario draws.
EvalCellResult evaluate_cell(const agents::AgentRuntime& agent,
                             const EpisodeSetup& base, const EvalCell& cell,
                             int n_seeds, std::uint64_t base_seed,
                             const EvalOptions& opts = {});

// Grid cells run concurrently on isolated state.
std::vector<EvalCellResult> evaluate_grid(const agents::AgentRuntime& agent,
                                          const EpisodeSetup& base,
                                          const std::vector<EvalCell>& cells,
                                          int n_seeds, std::uint64_t base_seed,
                                          const EvalOptions& opts = {});

}  // namespace transit::trainer
