#include "transit/agents/agent.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "transit/nn/checkpoint.hpp"

namespace transit::agents {

Variant variant_from_string(const std::string& name) {
  if (name == "nc") return Variant::NC;
  if (name == "fh") return Variant::FH;
  if (name == "iac") return Variant::IAC;
  if (name == "iqnc-n") return Variant::IQNC_N;
  if (name == "iqnc-ucf") return Variant::IQNC_UCF;
  if (name == "iqnc-cf") return Variant::IQNC_CF;
  if (name == "iqnc-m") return Variant::IQNC_M;
  throw std::invalid_argument("unknown agent variant: " + name);
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::NC: return "nc";
    case Variant::FH: return "fh";
    case Variant::IAC: return "iac";
    case Variant::IQNC_N: return "iqnc-n";
    case Variant::IQNC_UCF: return "iqnc-ucf";
    case Variant::IQNC_CF: return "iqnc-cf";
    case Variant::IQNC_M: return "iqnc-m";
  }
  return "?";
}

bool is_learned(Variant v) {
  return v == Variant::IAC || v == Variant::IQNC_N || v == Variant::IQNC_UCF ||
         v == Variant::IQNC_CF || v == Variant::IQNC_M;
}

void AgentSpec::validate() const {
  if (k_online < 1 || k_target < 1)
    throw std::invalid_argument("AgentSpec: K and K' must be >= 1");
  if (kappa <= 0) throw std::invalid_argument("AgentSpec: kappa must be > 0");
  if (gamma < 0 || gamma > 1)
    throw std::invalid_argument("AgentSpec: gamma must be in [0,1]");
  if (max_hold_s <= 0)
    throw std::invalid_argument("AgentSpec: max_hold must be > 0");
  if (reward_w < 0 || reward_w > 1)
    throw std::invalid_argument("AgentSpec: reward weight in [0,1]");
  if (variant == Variant::FH && fh.gain <= 0)
    throw std::invalid_argument("AgentSpec: FH gain must be > 0");
  if (fh.d_bar_s < 0)
    throw std::invalid_argument("AgentSpec: FH equilibrium delay >= 0");
}

double AgentSpec::effective_beta() const {
  if (beta != 0.0) return beta;
  if (variant == Variant::IQNC_UCF) return 0.8;
  if (variant == Variant::IQNC_CF) return -0.8;
  return 0.0;
}

double fh_hold(const env::Observation& obs, const FHConfig& cfg,
               double max_hold_s) {
  const double d = cfg.d_bar_s + cfg.gain * (cfg.h0_s - obs.h_fwd_s);
  return std::clamp(d, 0.0, max_hold_s);
}

AgentRuntime::AgentRuntime(const AgentSpec& spec, int n_agents,
                           double schedule_headway_s, std::uint64_t seed)
    : spec_(spec),
      n_agents_(n_agents),
      schedule_headway_s_(schedule_headway_s),
      fraction_rng_(derive_seed(seed, 41)) {
  spec_.validate();
  if (n_agents < 1) throw std::invalid_argument("AgentRuntime: no agents");
  if (spec_.fh.h0_s <= 0.0) spec_.fh.h0_s = schedule_headway_s;

  if (learned()) {
    actor_ = make_actor(4, spec_.hidden, "actor");
    if (spec_.variant == Variant::IAC)
      scalar_critic_ = ScalarCritic(4, spec_.hidden, "critic");
    else
      critic_ = QuantileCritic(4, spec_.hidden, spec_.n_cos, "critic");
    if (spec_.variant == Variant::IQNC_M)
      metanet_ = MetaWeightNet(spec_.k_online, spec_.attn_dim,
                               spec_.head_hidden, "meta");

    const int n_learners = spec_.shared_parameters ? 1 : n_agents;
    learners_.resize(n_learners);
    for (int i = 0; i < n_learners; ++i) {
      Rng init_rng(derive_seed(seed, 7000 + i));
      build_learner(learners_[i], init_rng);
    }
  }

  buffers_.reserve(n_agents);
  for (int i = 0; i < n_agents; ++i)
    buffers_.emplace_back(spec_.buffer_capacity, /*threshold_b=*/0,
                          spec_.minibatch_c);
}

void AgentRuntime::build_learner(Learner& l, Rng& rng) {
  actor_.register_params(l.theta);
  l.theta.finalize();
  actor_.init_params(l.theta, rng);
  l.theta_target = l.theta;

  if (spec_.variant == Variant::IAC) {
    scalar_critic_.register_params(l.phi);
    l.phi.finalize();
    scalar_critic_.init_params(l.phi, rng);
  } else {
    critic_.register_params(l.phi);
    l.phi.finalize();
    critic_.init_params(l.phi, rng);
  }
  l.phi_target = l.phi;

  if (spec_.variant == Variant::IQNC_M) {
    metanet_.register_params(l.eta);
    l.eta.finalize();
    metanet_.init_params(l.eta, rng);
  }
}

AgentRuntime::Learner& AgentRuntime::learner_for(int agent_id) {
  return learners_.at(spec_.shared_parameters ? 0 : agent_id);
}

const AgentRuntime::Learner& AgentRuntime::learner(int agent_id) const {
  return learners_.at(spec_.shared_parameters ? 0 : agent_id);
}

double AgentRuntime::act(int agent_id, const env::Observation& obs,
                         bool explore, Rng& rng) const {
  double a = 0.0;
  switch (spec_.variant) {
    case Variant::NC:
      return 0.0;
    case Variant::FH:
      return fh_hold(obs, spec_.fh, spec_.max_hold_s) / spec_.max_hold_s;
    default: {
      const auto& l = learner(agent_id);
      const Eigen::MatrixXd out = actor_.forward(l.theta, obs.features());
      a = out(0, 0);
      break;
    }
  }
  if (explore && spec_.explore_noise_std > 0.0 && noise_scale_ > 0.0)
    a += rng.normal(0.0, spec_.explore_noise_std * noise_scale_);
  return std::clamp(a, 0.0, 1.0);
}

void AgentRuntime::push_experience(int agent_id, env::Experience exp) {
  buffers_.at(agent_id).push(std::move(exp));
}

std::int64_t AgentRuntime::total_experiences() const {
  std::int64_t c = 0;
  for (const auto& b : buffers_) c += b.total_pushed();
  return c;
}

bool AgentRuntime::ready_to_train() const {
  return learned() && total_experiences() > spec_.buffer_threshold_b;
}

std::optional<UpdateStats> AgentRuntime::update_once(Rng& rng) {
  if (!learned()) return std::nullopt;
  for (std::size_t attempt = 0; attempt < buffers_.size(); ++attempt) {
    const std::size_t idx = round_robin_;
    round_robin_ = (round_robin_ + 1) % buffers_.size();
    auto batch = buffers_[idx].sample(rng, spec_.minibatch_c);
    if (batch.empty()) continue;
    std::vector<env::Experience> fresh;
    if (spec_.variant == Variant::IQNC_M)
      fresh = buffers_[idx].sample(rng, spec_.minibatch_c);
    return update_learner(learner_for(static_cast<int>(idx)),
                          std::move(batch), fresh, static_cast<int>(idx));
  }
  return std::nullopt;
}

UpdateStats AgentRuntime::update_learner(
    Learner& l, std::vector<env::Experience> batch,
    const std::vector<env::Experience>& fresh, int agent_index) {
  UpdateStats stats;
  stats.agent_index = agent_index;

  const nn::ParamStore& theta_next =
      spec_.use_target_actor ? l.theta_target : l.theta;

  if (spec_.variant == Variant::IAC) {
    l.phi.zero_grad();
    stats.critic_loss = scalar_critic_loss_and_grad(
        batch, scalar_critic_, l.phi, l.phi_target, actor_, theta_next,
        spec_.gamma);
    nn::AdamConfig ac;
    ac.lr = spec_.alpha_c;
    nn::adam_step(l.phi, ac);
    stats.actor_objective =
        scalar_actor_step(batch, actor_, l.theta, scalar_critic_, l.phi,
                          spec_.alpha_a);
  } else {
    CriticLossConfig cfg;
    cfg.k_online = spec_.k_online;
    cfg.k_target = spec_.k_target;
    cfg.kappa = spec_.kappa;
    cfg.gamma = spec_.gamma;
    cfg.paper_pair_weighting = spec_.paper_pair_weighting;
    cfg.random_fractions = spec_.random_fractions;

    l.phi.zero_grad();
    const auto closs = critic_loss_and_grad(batch, critic_, l.phi,
                                            l.phi_target, actor_, theta_next,
                                            cfg, &fraction_rng_);
    stats.critic_loss = closs.loss;
    nn::AdamConfig ac;
    ac.lr = spec_.alpha_c;
    nn::adam_step(l.phi, ac);

    WeightsSource ws;
    switch (spec_.variant) {
      case Variant::IQNC_N: ws.mode = WeightMode::Uniform; break;
      case Variant::IQNC_UCF:
      case Variant::IQNC_CF:
        ws.mode = WeightMode::Wang;
        ws.beta = spec_.effective_beta();
        break;
      case Variant::IQNC_M:
        ws.mode = WeightMode::Meta;
        ws.metanet = &metanet_;
        ws.eta = &l.eta;
        break;
      default: break;
    }

    auto step_data = quantile_actor_step(batch, actor_, l.theta, critic_,
                                         l.phi, spec_.k_online, ws,
                                         spec_.alpha_a);
    stats.actor_objective = step_data.objective;

    if (spec_.variant == Variant::IQNC_M && !fresh.empty())
      stats.meta_objective =
          meta_step(step_data, fresh, actor_, l.theta, critic_, l.phi,
                    metanet_, l.eta, spec_.alpha_a, spec_.alpha_m);
  }

  nn::copy_to_target(l.phi, l.phi_target, spec_.target_mix);
  if (spec_.use_target_actor)
    nn::copy_to_target(l.theta, l.theta_target, spec_.target_mix);

  last_critic_loss_ = stats.critic_loss;
  return stats;
}

Eigen::VectorXd AgentRuntime::meta_weights_for(const env::EventGraph& g) const {
  if (spec_.variant != Variant::IQNC_M)
    throw std::logic_error("meta_weights_for: not a meta agent");
  return metanet_.weights(learners_.at(0).eta, g);
}

void AgentRuntime::save_checkpoint(const std::string& manifest_path,
                                   std::int64_t step) const {
  if (!learned())
    throw std::logic_error("save_checkpoint: rule-based agent has no state");
  std::map<std::string, const nn::ParamStore*> stores;
  for (std::size_t i = 0; i < learners_.size(); ++i) {
    const std::string prefix =
        learners_.size() == 1 ? "" : "agent" + std::to_string(i) + ".";
    stores[prefix + "actor"] = &learners_[i].theta;
    stores[prefix + "actor_target"] = &learners_[i].theta_target;
    stores[prefix + "critic"] = &learners_[i].phi;
    stores[prefix + "critic_target"] = &learners_[i].phi_target;
    if (spec_.variant == Variant::IQNC_M)
      stores[prefix + "meta"] = &learners_[i].eta;
  }
  nn::save_checkpoint(manifest_path, stores, step,
                      {{"variant", to_string(spec_.variant)}});
}

void AgentRuntime::load_checkpoint(const std::string& manifest_path) {
  if (!learned())
    throw std::logic_error("load_checkpoint: rule-based agent has no state");
  std::map<std::string, nn::ParamStore*> stores;
  for (std::size_t i = 0; i < learners_.size(); ++i) {
    const std::string prefix =
        learners_.size() == 1 ? "" : "agent" + std::to_string(i) + ".";
    stores[prefix + "actor"] = &learners_[i].theta;
    stores[prefix + "actor_target"] = &learners_[i].theta_target;
    stores[prefix + "critic"] = &learners_[i].phi;
    stores[prefix + "critic_target"] = &learners_[i].phi_target;
    if (spec_.variant == Variant::IQNC_M)
      stores[prefix + "meta"] = &learners_[i].eta;
  }
  nn::load_checkpoint(manifest_path, stores);
}

}  // namespace transit::agents
