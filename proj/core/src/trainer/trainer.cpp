#include "transit/trainer/trainer.hpp"

#include <ostream>
#include <stdexcept>

namespace transit::trainer {

void TrainerConfig::validate() const {
  if (episodes < 1)
    throw std::invalid_argument("TrainerConfig: episodes must be >= 1");
  if (updates_per_episode < 0)
    throw std::invalid_argument("TrainerConfig: updates_per_episode >= 0");
  agent.validate();
}

TrainResult train(const TrainerConfig& cfg, const EpisodeSetup& setup,
                  agents::AgentRuntime& runtime, std::ostream* progress) {
  cfg.validate();
  TrainResult result;
  Rng update_rng(derive_seed(cfg.seed, 21));

  // graphs kept aside to profile the learned weights afterwards
  std::vector<env::EventGraph> sampled_graphs;

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    if (cfg.decay_noise && cfg.episodes > 1)
      runtime.set_noise_scale(1.0 - static_cast<double>(ep) /
                                        static_cast<double>(cfg.episodes));

    EpisodeOptions opts;
    opts.explore = runtime.learned();
    opts.trajectory_sample_every = cfg.trajectory_sample_every;
    EpisodeLog log = run_episode(runtime, setup,
                                 derive_seed(cfg.seed, 1000 + ep), opts);

    for (auto& [bus, exp] : log.experiences) {
      if (sampled_graphs.size() < 4096 && (sampled_graphs.size() & 1) == 0)
        sampled_graphs.push_back(exp.g);
      runtime.push_experience(bus, std::move(exp));
    }

    double critic_loss = 0.0;
    int done_updates = 0;
    if (runtime.ready_to_train()) {
      for (int u = 0; u < cfg.updates_per_episode; ++u) {
        const auto stats = runtime.update_once(update_rng);
        if (!stats) break;
        critic_loss = stats->critic_loss;
        if (critic_loss > cfg.divergence_guard)
          throw std::runtime_error(
              "train: critic loss exceeded the divergence guard");
        ++done_updates;
        ++result.total_updates;
      }
    }

    result.curves.push_back(
        {ep, log.mean_reward, critic_loss, log.report.aht_s});
    if (progress && (ep % 10 == 0 || ep + 1 == cfg.episodes))
      *progress << "episode " << ep << " reward " << log.mean_reward
                << " critic_loss " << critic_loss << " aht "
                << log.report.aht_s << " updates " << done_updates << "\n";
  }

  if (runtime.spec().variant == agents::Variant::IQNC_M) {
    result.meta_profile.midpoints =
        agents::even_quantiles(runtime.spec().k_online).midpoints;
    std::map<int, std::pair<Eigen::VectorXd, int>> acc;
    for (const auto& g : sampled_graphs) {
      const Eigen::VectorXd w = runtime.meta_weights_for(g);
      auto& slot = acc[g.event_count()];
      if (slot.second == 0) slot.first = Eigen::VectorXd::Zero(w.size());
      slot.first += w;
      slot.second += 1;
    }
    for (auto& [count, sum] : acc)
      result.meta_profile.mean_weight_by_count[count] =
          sum.first / static_cast<double>(sum.second);
  }
  return result;
}

}  // namespace transit::trainer
