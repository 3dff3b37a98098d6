#pragma once

#include <Eigen/Core>
#include <vector>

#include "transit/agents/distortion.hpp"
#include "transit/env/env.hpp"
#include "transit/nn/mlp.hpp"

namespace transit::agents {

// Implicit-quantile critic. The state-action trunk and the embedded
// quantile fraction are fused by elementwise product before the head:
//   Z_tau(s, a) = head( trunk([s; a]) .* relu(W_e cos(pi i tau) + b_e) ).
class QuantileCritic {
 public:
  QuantileCritic() = default;
  QuantileCritic(int state_dim, int hidden, int n_cos, std::string prefix);

  void register_params(nn::ParamStore& store) const;
  void init_params(nn::ParamStore& store, Rng& rng) const;

  struct Cache {
    nn::Mlp::Cache trunk;
    nn::Mlp::Cache embed;
    nn::Mlp::Cache head;
    Eigen::MatrixXd psi;        // hidden x n
    Eigen::MatrixXd emb;        // hidden x K
    Eigen::VectorXd taus;       // K
    Eigen::Index batch = 0;
  };

  // Z values, one row per fraction, one column per sample.
  Eigen::MatrixXd quantiles(const nn::ParamStore& store,
                            const Eigen::MatrixXd& state_action,
                            const Eigen::VectorXd& taus,
                            Cache* cache = nullptr) const;

  // Reverse mode from dZ (K x n); accumulates parameter gradients and
  // returns the state-action input gradient (dim x n).
  Eigen::MatrixXd backward(nn::ParamStore& store, const Cache& cache,
                           const Eigen::MatrixXd& dZ) const;

  // Forward-mode derivative of every Z(k, b) w.r.t. the action input of
  // its own column; one pass for the whole batch.
  Eigen::MatrixXd action_jvp(const nn::ParamStore& store,
                             const Cache& cache) const;

  // cos(pi * i * tau) features, i = 0..n_cos-1, one column per tau.
  static Eigen::MatrixXd cosine_features(const Eigen::VectorXd& taus,
                                         int n_cos);

  int input_dim() const { return state_dim_ + 1; }
  int n_cos() const { return n_cos_; }

 private:
  int state_dim_ = 4;
  int hidden_ = 64;
  int n_cos_ = 64;
  nn::Mlp trunk_;
  nn::Mlp embed_;
  nn::Mlp head_;
};

// Plain scalar state-action critic used by the independent actor-critic
// baseline.
class ScalarCritic {
 public:
  ScalarCritic() = default;
  ScalarCritic(int state_dim, int hidden, std::string prefix);

  void register_params(nn::ParamStore& store) const;
  void init_params(nn::ParamStore& store, Rng& rng) const;

  Eigen::RowVectorXd values(const nn::ParamStore& store,
                            const Eigen::MatrixXd& state_action,
                            nn::Mlp::Cache* cache = nullptr) const;
  Eigen::MatrixXd backward(nn::ParamStore& store, const nn::Mlp::Cache& cache,
                           const Eigen::RowVectorXd& dv) const;

  int input_dim() const { return state_dim_ + 1; }

 private:
  int state_dim_ = 4;
  nn::Mlp net_;
};

struct CriticLossConfig {
  int k_online = 32;
  int k_target = 32;
  double kappa = 1.0;
  double gamma = 0.99;
  bool paper_pair_weighting = false;  // literal (tau_k - tau_k') factor
  bool random_fractions = false;
};

struct CriticLossResult {
  double loss = 0.0;
  QuantileSet online;  // fractions actually used (values of first sample)
};

// Distributional TD loss over a batch of complete experiences. Quantile
// samples are sorted ascending per sample before the pairwise TD errors;
// gradients are routed back through the sort permutation and accumulated
// into `phi.grad`.
CriticLossResult critic_loss_and_grad(
    const std::vector<env::Experience>& batch, const QuantileCritic& critic,
    nn::ParamStore& phi, const nn::ParamStore& phi_target,
    const nn::Mlp& actor, const nn::ParamStore& theta_next,
    const CriticLossConfig& cfg, Rng* fraction_rng = nullptr);

// DDPG-style scalar TD loss: mean squared error against
// r + gamma * Q_target(s', mu(s')). Accumulates into `phi.grad`.
double scalar_critic_loss_and_grad(const std::vector<env::Experience>& batch,
                                   const ScalarCritic& critic,
                                   nn::ParamStore& phi,
                                   const nn::ParamStore& phi_target,
                                   const nn::Mlp& actor,
                                   const nn::ParamStore& theta_next,
                                   double gamma);

Eigen::MatrixXd batch_states(const std::vector<env::Experience>& batch,
                             bool next_state);
Eigen::MatrixXd batch_state_actions(const std::vector<env::Experience>& batch);

}  // namespace transit::agents
