#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "transit/agents/actor.hpp"
#include "transit/agents/critic.hpp"
#include "transit/agents/meta.hpp"
#include "transit/env/env.hpp"
#include "transit/nn/params.hpp"

namespace transit::agents {

enum class Variant { NC, FH, IAC, IQNC_N, IQNC_UCF, IQNC_CF, IQNC_M };

Variant variant_from_string(const std::string& name);
const char* to_string(Variant v);
bool is_learned(Variant v);

// Forward-headway rule parameters; h0 of zero means "use the schedule
// headway of the route".
struct FHConfig {
  double h0_s = 0.0;
  double d_bar_s = 30.0;
  double gain = 0.5;
};

struct AgentSpec {
  Variant variant = Variant::NC;

  int k_online = 32;
  int k_target = 32;
  double kappa = 1.0;
  double gamma = 0.99;
  double beta = 0.0;  // Wang distortion; defaulted by variant when 0

  double alpha_a = 1e-4;
  double alpha_c = 1e-3;
  double alpha_m = 1e-3;
  double target_mix = 0.005;

  int buffer_threshold_b = 2000;
  int minibatch_c = 64;
  int buffer_capacity = 100000;

  double max_hold_s = 180.0;
  double reward_w = 0.2;
  double explore_noise_std = 0.1;

  int hidden = 64;
  int n_cos = 64;
  int attn_dim = 32;
  int head_hidden = 64;

  bool shared_parameters = true;
  bool random_fractions = false;
  bool paper_pair_weighting = false;
  bool use_target_actor = false;

  FHConfig fh;

  void validate() const;
  double effective_beta() const;
};

// d = max(0, d_bar + gain * (h0 - forward_headway)), clamped to the
// holding cap.
double fh_hold(const env::Observation& obs, const FHConfig& cfg,
               double max_hold_s);

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_objective = 0.0;
  double meta_objective = 0.0;
  int agent_index = -1;
};

// Policy plus learning state for one run. With shared parameters all
// buses use learner 0 while keeping per-bus replay buffers.
class AgentRuntime {
 public:
  AgentRuntime(const AgentSpec& spec, int n_agents, double schedule_headway_s,
               std::uint64_t seed);

  const AgentSpec& spec() const { return spec_; }
  int n_agents() const { return n_agents_; }
  bool learned() const { return is_learned(spec_.variant); }

  // Action in [0,1]; exploration adds clamped Gaussian noise scaled by
  // the current noise level.
  double act(int agent_id, const env::Observation& obs, bool explore,
             Rng& rng) const;

  void set_noise_scale(double scale) { noise_scale_ = scale; }

  void push_experience(int agent_id, env::Experience exp);
  std::int64_t total_experiences() const;
  bool ready_to_train() const;

  // One critic/actor(/meta) update triple from the next buffer in
  // round-robin order. Returns nothing when every buffer is empty.
  std::optional<UpdateStats> update_once(Rng& rng);

  // Mean meta distortion weights for a graph (IQNC-M introspection).
  Eigen::VectorXd meta_weights_for(const env::EventGraph& g) const;

  void save_checkpoint(const std::string& manifest_path,
                       std::int64_t step) const;
  void load_checkpoint(const std::string& manifest_path);

  double last_critic_loss() const { return last_critic_loss_; }

  struct Learner {
    nn::ParamStore theta;
    nn::ParamStore theta_target;
    nn::ParamStore phi;
    nn::ParamStore phi_target;
    nn::ParamStore eta;
  };
  const Learner& learner(int agent_id) const;

 private:
  Learner& learner_for(int agent_id);
  void build_learner(Learner& l, Rng& rng);
  UpdateStats update_learner(Learner& l, std::vector<env::Experience> batch,
                             const std::vector<env::Experience>& fresh,
                             int agent_index);

  AgentSpec spec_;
  int n_agents_ = 0;
  double schedule_headway_s_ = 0.0;
  double noise_scale_ = 1.0;

  nn::Mlp actor_;
  QuantileCritic critic_;
  ScalarCritic scalar_critic_;
  MetaWeightNet metanet_;

  std::vector<Learner> learners_;
  std::vector<env::ReplayBuffer> buffers_;
  std::size_t round_robin_ = 0;
  double last_critic_loss_ = 0.0;
  Rng fraction_rng_;
};

}  // namespace transit::agents
