#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "transit/agents/critic.hpp"
#include "transit/agents/meta.hpp"
#include "transit/env/env.hpp"
#include "transit/nn/mlp.hpp"

namespace transit::agents {

// Deterministic policy network, sigmoid output so actions live in [0,1].
nn::Mlp make_actor(int state_dim, int hidden, const std::string& prefix);

enum class WeightMode { Uniform, Wang, Meta };

struct WeightsSource {
  WeightMode mode = WeightMode::Uniform;
  double beta = 0.0;  // Wang
  const MetaWeightNet* metanet = nullptr;
  const nn::ParamStore* eta = nullptr;
};

// q and dq/da per sample for actions chosen by the actor; the
// deterministic policy-gradient chain rule does the rest.
using ActionValueFn = std::function<void(
    const Eigen::MatrixXd& states, const Eigen::RowVectorXd& actions,
    Eigen::RowVectorXd& q, Eigen::RowVectorXd& dq_da)>;

struct ActorGradResult {
  double objective = 0.0;  // batch mean of q
  Eigen::RowVectorXd actions;
  nn::Mlp::Cache cache;
};

// Accumulates d(batch-mean q)/d(theta) into theta.grad.
ActorGradResult actor_objective_grad(const Eigen::MatrixXd& states,
                                     const nn::Mlp& actor,
                                     nn::ParamStore& theta,
                                     const ActionValueFn& eval);

// Everything the meta step needs from the actor step it differentiates.
struct ActorStepData {
  double objective = 0.0;
  int n = 0;
  Eigen::MatrixXd states;            // 4 x n
  nn::Mlp::Cache actor_cache;        // forward at theta before the step
  nn::ParamStore theta_before;       // parameter snapshot
  Eigen::MatrixXd g_sorted;          // K x n action grads at sorted slots
  Eigen::VectorXd delta_tau;         // K fraction widths
  std::vector<MetaWeightNet::Cache> meta_caches;  // per sample (Meta mode)
};

// Distorted-quantile actor objective: per sample, quantile values are
// sorted ascending and averaged with (width * weight) coefficients; the
// gradient ascends theta by alpha_a (plain step, so the meta gradient can
// differentiate the exact update).
ActorStepData quantile_actor_step(const std::vector<env::Experience>& batch,
                                  const nn::Mlp& actor, nn::ParamStore& theta,
                                  const QuantileCritic& critic,
                                  const nn::ParamStore& phi, int k,
                                  const WeightsSource& weights, double alpha_a);

// DDPG-style actor step against a scalar critic.
double scalar_actor_step(const std::vector<env::Experience>& batch,
                         const nn::Mlp& actor, nn::ParamStore& theta,
                         const ScalarCritic& critic, const nn::ParamStore& phi,
                         double alpha_a);

// Meta-gradient step: differentiates J'(uniform weights, fresh batch,
// theta') through theta' = theta + alpha_a * dJ/dtheta with respect to
// the meta parameters, then ascends eta with Adam. Returns J'.
double meta_step(const ActorStepData& step,
                 const std::vector<env::Experience>& fresh_batch,
                 const nn::Mlp& actor, nn::ParamStore& theta_now,
                 const QuantileCritic& critic, const nn::ParamStore& phi,
                 const MetaWeightNet& metanet, nn::ParamStore& eta,
                 double alpha_a, double alpha_m);

// Gradient of J' w.r.t. eta only (no optimizer step); used by the
// finite-difference oracle and by meta_step itself.
Eigen::VectorXd meta_gradient(const ActorStepData& step,
                              const std::vector<env::Experience>& fresh_batch,
                              const nn::Mlp& actor,
                              const nn::ParamStore& theta_now,
                              const QuantileCritic& critic,
                              const nn::ParamStore& phi,
                              const MetaWeightNet& metanet,
                              const nn::ParamStore& eta, double alpha_a,
                              double* jprime_out = nullptr);

}  // namespace transit::agents
