#include "transit/selftest.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "transit/agents/actor.hpp"
#include "transit/agents/agent.hpp"
#include "transit/agents/critic.hpp"
#include "transit/agents/distortion.hpp"
#include "transit/agents/losses.hpp"
#include "transit/mathx.hpp"
#include "transit/nn/gradcheck.hpp"

namespace transit::selftest {

namespace {

using agents::QuantileCritic;
using nn::ParamStore;

env::Observation synthetic_obs(Rng& rng) {
  env::Observation o;
  o.h_fwd_s = rng.uniform(100, 900);
  o.h_bwd_s = rng.uniform(100, 900);
  o.onboard = static_cast<int>(rng.below(100));
  o.waiting = static_cast<int>(rng.below(40));
  o.normalized << o.h_fwd_s / 600.0, o.h_bwd_s / 600.0, o.onboard / 120.0,
      o.waiting / 120.0;
  return o;
}

std::vector<env::Experience> synthetic_batch(int n, Rng& rng) {
  std::vector<env::Experience> batch(n);
  for (auto& e : batch) {
    e.s = synthetic_obs(rng);
    e.s_next = synthetic_obs(rng);
    e.a = rng.uniform();
    e.r.a = e.a;
    e.r.cv2 = rng.uniform(0, 2);
    e.r.r = -0.8 * e.r.cv2 - 0.2 * e.a;
    e.g.ego << e.s.normalized, e.a;
    const int m = static_cast<int>(rng.below(4));
    for (int j = 0; j < m; ++j) {
      env::EventNode node;
      node.state = synthetic_obs(rng).normalized;
      node.action = rng.uniform();
      node.d_stop = rng.uniform(-0.5, 0.5);
      node.d_time = rng.uniform(0, 1);
      e.g.events.push_back(node);
    }
  }
  return batch;
}

CheckResult check(const std::string& name, bool ok, const std::string& detail) {
  return {name, ok, detail};
}

CheckResult quantile_huber_values() {
  using agents::quantile_huber;
  const double v1 = quantile_huber(0.0, 0.3, 1.0);
  const double v2 = quantile_huber(0.5, 0.5, 1.0);
  const double v3 = quantile_huber(-2.0, 0.9, 1.0);
  const bool ok = std::abs(v1) < 1e-12 && std::abs(v2 - 0.0625) < 1e-12 &&
                  std::abs(v3 - 0.15) < 1e-12;
  std::ostringstream d;
  d << v1 << " " << v2 << " " << v3;
  return check("quantile_huber hand values", ok, d.str());
}

CheckResult quantile_huber_continuity() {
  using agents::quantile_huber;
  double worst = 0.0;
  for (double kappa : {0.5, 1.0, 2.0})
    for (double tau : {0.1, 0.5, 0.9})
      for (double sign : {-1.0, 1.0}) {
        const double at = quantile_huber(sign * kappa, tau, kappa);
        const double near = quantile_huber(sign * (kappa - 1e-10), tau, kappa);
        worst = std::max(worst, std::abs(at - near));
      }
  return check("quantile_huber branch continuity", worst < 1e-9,
               "max gap " + std::to_string(worst));
}

CheckResult wang_values() {
  const auto grid = agents::even_quantiles(16);
  const Eigen::VectorXd w0 = agents::wang_weights(0.0, grid.midpoints);
  bool ok = (w0.array() - 1.0).abs().maxCoeff() < 1e-12;

  Eigen::VectorXd mid(1);
  mid << 0.5;
  const double w = agents::wang_weights(0.8, mid)(0);
  ok = ok && std::abs(w - std::exp(-0.32)) < 1e-9;

  // g' integrates to g(1)-g(0) = 1
  const auto fine = agents::even_quantiles(1000);
  for (double beta : {0.8, -0.8, 0.3, -0.3}) {
    const Eigen::VectorXd wb = agents::wang_weights(beta, fine.midpoints);
    const double integral = wb.sum() / 1000.0;
    ok = ok && std::abs(integral - 1.0) < 1e-3;
  }

  // beta > 0 decays over tau, beta < 0 grows
  const Eigen::VectorXd wa = agents::wang_weights(0.8, fine.midpoints);
  const Eigen::VectorXd ws = agents::wang_weights(-0.8, fine.midpoints);
  for (int i = 1; i < 1000; ++i) {
    ok = ok && wa(i) < wa(i - 1);
    ok = ok && ws(i) > ws(i - 1);
  }
  return check("wang distortion weights", ok, "");
}

CheckResult mlp_gradients() {
  Rng rng(123);
  double worst = 0.0;
  for (auto hidden : {nn::Activation::Relu, nn::Activation::Tanh,
                      nn::Activation::Identity}) {
    nn::Mlp net(nn::NetworkSpec::dense({3, 5, 2}, hidden, nn::Activation::Tanh),
                "net");
    ParamStore store;
    net.register_params(store);
    store.finalize();
    net.init_params(store, rng);

    Eigen::MatrixXd x(3, 4);
    for (int i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1, 1);
    Eigen::MatrixXd dy(2, 4);
    for (int i = 0; i < dy.size(); ++i) dy.data()[i] = rng.uniform(-1, 1);

    const auto loss = [&] {
      return (net.forward(store, x).array() * dy.array()).sum();
    };
    nn::Mlp::Cache cache;
    net.forward(store, x, &cache);
    store.zero_grad();
    net.backward(store, cache, dy);
    worst = std::max(
        worst, nn::max_rel_error(store.grad, nn::numeric_gradient(store, loss)));
  }
  return check("mlp gradient vs finite differences", worst < 1e-5,
               "max rel err " + std::to_string(worst));
}

CheckResult critic_and_actor_gradients() {
  Rng rng(321);
  QuantileCritic critic(4, 8, 8, "critic");
  ParamStore phi;
  critic.register_params(phi);
  phi.finalize();
  critic.init_params(phi, rng);
  ParamStore phi_target = phi;

  nn::Mlp actor = agents::make_actor(4, 8, "actor");
  ParamStore theta;
  actor.register_params(theta);
  theta.finalize();
  actor.init_params(theta, rng);

  auto batch = synthetic_batch(3, rng);
  agents::CriticLossConfig cfg;
  cfg.k_online = 4;
  cfg.k_target = 5;
  cfg.gamma = 0.9;
  cfg.kappa = 1.0;

  const auto loss_fn = [&] {
    ParamStore scratch = phi;
    return agents::critic_loss_and_grad(batch, critic, scratch, phi_target,
                                        actor, theta, cfg)
        .loss;
  };
  phi.zero_grad();
  agents::critic_loss_and_grad(batch, critic, phi, phi_target, actor, theta,
                               cfg);
  const double critic_err =
      nn::max_rel_error(phi.grad, nn::numeric_gradient(phi, loss_fn));

  // actor objective: uniform distorted Q of the actor's own actions
  const Eigen::MatrixXd states = agents::batch_states(batch, false);
  const auto grid = agents::even_quantiles(4);
  const auto objective = [&] {
    const Eigen::MatrixXd a = actor.forward(theta, states);
    Eigen::MatrixXd sa(5, states.cols());
    sa.topRows(4) = states;
    sa.row(4) = a.row(0);
    const Eigen::MatrixXd z = critic.quantiles(phi, sa, grid.midpoints);
    double j = 0.0;
    for (Eigen::Index b = 0; b < z.cols(); ++b)
      for (Eigen::Index k = 0; k < z.rows(); ++k)
        j += 0.25 * z(k, b) / static_cast<double>(z.cols());
    return j;
  };
  // a zero-length step leaves theta unchanged and its grad populated
  agents::WeightsSource uniform;
  ParamStore theta_for_grad = theta;
  agents::quantile_actor_step(batch, actor, theta_for_grad, critic, phi, 4,
                              uniform, /*alpha_a=*/0.0);
  const double actor_err = nn::max_rel_error(
      theta_for_grad.grad, nn::numeric_gradient(theta, objective));

  const bool ok = critic_err < 1e-5 && actor_err < 1e-5;
  std::ostringstream d;
  d << "critic " << critic_err << " actor " << actor_err;
  return check("critic/actor gradients vs finite differences", ok, d.str());
}

CheckResult meta_gradient_check() {
  Rng rng(777);
  QuantileCritic critic(4, 8, 8, "critic");
  ParamStore phi;
  critic.register_params(phi);
  phi.finalize();
  critic.init_params(phi, rng);

  nn::Mlp actor = agents::make_actor(4, 8, "actor");
  ParamStore theta;
  actor.register_params(theta);
  theta.finalize();
  actor.init_params(theta, rng);

  agents::MetaWeightNet metanet(4, 6, 8, "meta");
  ParamStore eta;
  metanet.register_params(eta);
  eta.finalize();
  metanet.init_params(eta, rng);

  auto batch = synthetic_batch(3, rng);
  auto fresh = synthetic_batch(3, rng);
  const double alpha_a = 0.05;

  agents::WeightsSource ws;
  ws.mode = agents::WeightMode::Meta;
  ws.metanet = &metanet;
  ws.eta = &eta;

  ParamStore theta_stepped = theta;
  const auto step = agents::quantile_actor_step(batch, actor, theta_stepped,
                                                critic, phi, 4, ws, alpha_a);
  const Eigen::VectorXd analytic = agents::meta_gradient(
      step, fresh, actor, theta_stepped, critic, phi, metanet, eta, alpha_a);

  const auto jprime_of_eta = [&] {
    ParamStore th = theta;
    const auto s = agents::quantile_actor_step(batch, actor, th, critic, phi,
                                               4, ws, alpha_a);
    (void)s;
    const Eigen::MatrixXd states = agents::batch_states(fresh, false);
    const Eigen::MatrixXd a = actor.forward(th, states);
    Eigen::MatrixXd sa(5, states.cols());
    sa.topRows(4) = states;
    sa.row(4) = a.row(0);
    const auto grid = agents::even_quantiles(4);
    const Eigen::MatrixXd z = critic.quantiles(phi, sa, grid.midpoints);
    double j = 0.0;
    for (Eigen::Index b = 0; b < z.cols(); ++b)
      for (Eigen::Index k = 0; k < z.rows(); ++k)
        j += 0.25 * z(k, b) / static_cast<double>(z.cols());
    return j;
  };
  const Eigen::VectorXd numeric = nn::numeric_gradient(eta, jprime_of_eta);
  const double err = nn::max_rel_error(analytic, numeric);
  return check("meta second-order gradient vs finite differences", err < 1e-4,
               "max rel err " + std::to_string(err));
}

}  // namespace

std::vector<CheckResult> run_checks() {
  std::vector<CheckResult> results;
  results.push_back(quantile_huber_values());
  results.push_back(quantile_huber_continuity());
  results.push_back(wang_values());
  results.push_back(mlp_gradients());
  results.push_back(critic_and_actor_gradients());
  results.push_back(meta_gradient_check());
  return results;
}

bool run_all(std::ostream* out) {
  bool all = true;
  for (const auto& r : run_checks()) {
    all = all && r.passed;
    if (out)
      *out << (r.passed ? "PASS" : "FAIL") << " " << r.name
           << (r.detail.empty() ? "" : " (" + r.detail + ")") << "\n";
  }
  return all;
}

}  // namespace transit::selftest
