#include "transit/agents/actor.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace transit::agents {

nn::Mlp make_actor(int state_dim, int hidden, const std::string& prefix) {
  return nn::Mlp(nn::NetworkSpec::dense({state_dim, hidden, hidden, 1},
                                        nn::Activation::Relu,
                                        nn::Activation::Sigmoid),
                 prefix);
}

ActorGradResult actor_objective_grad(const Eigen::MatrixXd& states,
                                     const nn::Mlp& actor,
                                     nn::ParamStore& theta,
                                     const ActionValueFn& eval) {
  ActorGradResult res;
  const Eigen::Index n = states.cols();
  res.actions = actor.forward(theta, states, &res.cache).row(0);

  Eigen::RowVectorXd q(n), dq_da(n);
  eval(states, res.actions, q, dq_da);

  res.objective = q.sum() / static_cast<double>(n);
  const Eigen::MatrixXd da = dq_da / static_cast<double>(n);
  actor.backward(theta, res.cache, da);
  return res;
}

namespace {

std::vector<Eigen::Index> sort_perm(const Eigen::VectorXd& v) {
  std::vector<Eigen::Index> p(v.size());
  std::iota(p.begin(), p.end(), 0);
  std::stable_sort(p.begin(), p.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return v(a) < v(b); });
  return p;
}

}  // namespace

ActorStepData quantile_actor_step(const std::vector<env::Experience>& batch,
                                  const nn::Mlp& actor, nn::ParamStore& theta,
                                  const QuantileCritic& critic,
                                  const nn::ParamStore& phi, int k,
                                  const WeightsSource& weights,
                                  double alpha_a) {
  if (batch.empty())
    throw std::invalid_argument("quantile_actor_step: empty batch");
  if (weights.mode == WeightMode::Meta &&
      (weights.metanet == nullptr || weights.eta == nullptr))
    throw std::invalid_argument("quantile_actor_step: meta source unset");

  ActorStepData data;
  data.n = static_cast<int>(batch.size());
  data.states = batch_states(batch, /*next_state=*/false);
  data.theta_before = theta;

  const QuantileSet grid = even_quantiles(k);
  data.delta_tau = grid.widths();

  Eigen::VectorXd wang;
  if (weights.mode == WeightMode::Wang)
    wang = wang_weights(weights.beta, grid.midpoints);

  QuantileCritic::Cache ccache;
  if (weights.mode == WeightMode::Meta)
    data.meta_caches.resize(batch.size());

  const auto eval = [&](const Eigen::MatrixXd& states,
                        const Eigen::RowVectorXd& actions,
                        Eigen::RowVectorXd& q, Eigen::RowVectorXd& dq_da) {
    const Eigen::Index n = states.cols();
    Eigen::MatrixXd sa(states.rows() + 1, n);
    sa.topRows(states.rows()) = states;
    sa.row(states.rows()) = actions;

    const Eigen::MatrixXd z = critic.quantiles(phi, sa, grid.midpoints, &ccache);
    const Eigen::MatrixXd g = critic.action_jvp(phi, ccache);

    data.g_sorted.resize(k, n);
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto perm = sort_perm(z.col(b));
      Eigen::VectorXd w;
      switch (weights.mode) {
        case WeightMode::Uniform: w = Eigen::VectorXd::Ones(k); break;
        case WeightMode::Wang: w = wang; break;
        case WeightMode::Meta:
          w = weights.metanet->weights(
              *weights.eta, batch[static_cast<std::size_t>(b)].g,
              &data.meta_caches[static_cast<std::size_t>(b)]);
          break;
      }
      double qb = 0.0, db = 0.0;
      for (int j = 0; j < k; ++j) {
        const double coeff = data.delta_tau(j) * w(j);
        qb += coeff * z(perm[j], b);
        data.g_sorted(j, b) = g(perm[j], b);
        db += coeff * data.g_sorted(j, b);
      }
      q(b) = qb;
      dq_da(b) = db;
    }
  };

  theta.zero_grad();
  auto res = actor_objective_grad(data.states, actor, theta, eval);
  data.objective = res.objective;
  data.actor_cache = std::move(res.cache);

  nn::sgd_step(theta, alpha_a, /*ascend=*/true);
  return data;
}

double scalar_actor_step(const std::vector<env::Experience>& batch,
                         const nn::Mlp& actor, nn::ParamStore& theta,
                         const ScalarCritic& critic, const nn::ParamStore& phi,
                         double alpha_a) {
  if (batch.empty())
    throw std::invalid_argument("scalar_actor_step: empty batch");
  const Eigen::MatrixXd states = batch_states(batch, false);

  nn::Mlp::Cache ccache;
  const auto eval = [&](const Eigen::MatrixXd& s,
                        const Eigen::RowVectorXd& actions,
                        Eigen::RowVectorXd& q, Eigen::RowVectorXd& dq_da) {
    Eigen::MatrixXd sa(s.rows() + 1, s.cols());
    sa.topRows(s.rows()) = s;
    sa.row(s.rows()) = actions;
    q = critic.values(phi, sa, &ccache);
    // dq/da via one reverse pass over the whole batch
    nn::ParamStore scratch = phi;
    scratch.zero_grad();
    const Eigen::MatrixXd dsa = critic.backward(
        scratch, ccache, Eigen::RowVectorXd::Ones(s.cols()));
    dq_da = dsa.row(s.rows());
  };

  theta.zero_grad();
  const auto res = actor_objective_grad(states, actor, theta, eval);
  nn::sgd_step(theta, alpha_a, true);
  return res.objective;
}

Eigen::VectorXd meta_gradient(const ActorStepData& step,
                              const std::vector<env::Experience>& fresh_batch,
                              const nn::Mlp& actor,
                              const nn::ParamStore& theta_now,
                              const QuantileCritic& critic,
                              const nn::ParamStore& phi,
                              const MetaWeightNet& metanet,
                              const nn::ParamStore& eta, double alpha_a,
                              double* jprime_out) {
  if (step.meta_caches.size() != static_cast<std::size_t>(step.n))
    throw std::invalid_argument("meta_gradient: step lacks meta caches");
  const int k = static_cast<int>(step.delta_tau.size());

  // dJ'/dtheta' with fixed all-ones weights on the fresh sample
  nn::ParamStore theta_scratch = theta_now;
  theta_scratch.zero_grad();
  const Eigen::MatrixXd states_prime = batch_states(fresh_batch, false);
  QuantileCritic::Cache ccache;
  const QuantileSet grid = even_quantiles(k);
  const auto uniform_eval = [&](const Eigen::MatrixXd& s,
                                const Eigen::RowVectorXd& actions,
                                Eigen::RowVectorXd& q,
                                Eigen::RowVectorXd& dq_da) {
    Eigen::MatrixXd sa(s.rows() + 1, s.cols());
    sa.topRows(s.rows()) = s;
    sa.row(s.rows()) = actions;
    const Eigen::MatrixXd z = critic.quantiles(phi, sa, grid.midpoints, &ccache);
    const Eigen::MatrixXd g = critic.action_jvp(phi, ccache);
    for (Eigen::Index b = 0; b < s.cols(); ++b) {
      double qb = 0.0, db = 0.0;
      for (int j = 0; j < k; ++j) {
        // uniform weights: sorting is irrelevant for the sum
        qb += step.delta_tau(j) * z(j, b);
        db += step.delta_tau(j) * g(j, b);
      }
      q(b) = qb;
      dq_da(b) = db;
    }
  };
  const auto jres =
      actor_objective_grad(states_prime, actor, theta_scratch, uniform_eval);
  if (jprime_out) *jprime_out = jres.objective;
  const Eigen::VectorXd g_prime = theta_scratch.grad;

  // directional derivative of mu_theta(s_b) along dJ'/dtheta', evaluated
  // at the pre-step parameters
  const Eigen::MatrixXd s_dir =
      actor.jvp(step.theta_before, g_prime, step.actor_cache);

  Eigen::VectorXd eta_grad = Eigen::VectorXd::Zero(eta.size());
  nn::ParamStore eta_scratch = eta;
  const double scale = alpha_a / static_cast<double>(step.n);
  for (int b = 0; b < step.n; ++b) {
    const Eigen::VectorXd dw =
        scale * s_dir(0, b) *
        step.delta_tau.cwiseProduct(step.g_sorted.col(b));
    eta_scratch.zero_grad();
    metanet.backward(eta_scratch, step.meta_caches[static_cast<std::size_t>(b)],
                     dw);
    eta_grad += eta_scratch.grad;
  }
  return eta_grad;
}

double meta_step(const ActorStepData& step,
                 const std::vector<env::Experience>& fresh_batch,
                 const nn::Mlp& actor, nn::ParamStore& theta_now,
                 const QuantileCritic& critic, const nn::ParamStore& phi,
                 const MetaWeightNet& metanet, nn::ParamStore& eta,
                 double alpha_a, double alpha_m) {
  double jprime = 0.0;
  const Eigen::VectorXd grad =
      meta_gradient(step, fresh_batch, actor, theta_now, critic, phi, metanet,
                    eta, alpha_a, &jprime);
  if (!grad.allFinite())
    throw std::runtime_error("meta_step: non-finite second-order gradient");
  eta.grad = grad;
  nn::AdamConfig cfg;
  cfg.lr = alpha_m;
  nn::adam_step(eta, cfg, /*ascend=*/true);
  return jprime;
}

}  // namespace transit::agents
