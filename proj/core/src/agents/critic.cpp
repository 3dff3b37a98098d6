#include "transit/agents/critic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "transit/agents/losses.hpp"

namespace transit::agents {

QuantileCritic::QuantileCritic(int state_dim, int hidden, int n_cos,
                               std::string prefix)
    : state_dim_(state_dim),
      hidden_(hidden),
      n_cos_(n_cos),
      trunk_(nn::NetworkSpec::dense({state_dim + 1, hidden, hidden},
                                    nn::Activation::Relu,
                                    nn::Activation::Relu),
             prefix + ".trunk"),
      embed_(nn::NetworkSpec::dense({n_cos, hidden}, nn::Activation::Relu,
                                    nn::Activation::Relu),
             prefix + ".embed"),
      head_(nn::NetworkSpec::dense({hidden, hidden, 1}, nn::Activation::Relu,
                                   nn::Activation::Identity),
            prefix + ".head") {
  if (n_cos < 1) throw std::invalid_argument("QuantileCritic: n_cos >= 1");
}

void QuantileCritic::register_params(nn::ParamStore& store) const {
  trunk_.register_params(store);
  embed_.register_params(store);
  head_.register_params(store);
}

void QuantileCritic::init_params(nn::ParamStore& store, Rng& rng) const {
  trunk_.init_params(store, rng);
  embed_.init_params(store, rng);
  head_.init_params(store, rng);
}

Eigen::MatrixXd QuantileCritic::cosine_features(const Eigen::VectorXd& taus,
                                                int n_cos) {
  for (Eigen::Index k = 0; k < taus.size(); ++k)
    if (taus(k) < 0.0 || taus(k) > 1.0)
      throw std::invalid_argument("quantile fraction outside [0,1]");
  Eigen::MatrixXd c(n_cos, taus.size());
  for (Eigen::Index k = 0; k < taus.size(); ++k)
    for (int i = 0; i < n_cos; ++i)
      c(i, k) = std::cos(M_PI * static_cast<double>(i) * taus(k));
  return c;
}

Eigen::MatrixXd QuantileCritic::quantiles(const nn::ParamStore& store,
                                          const Eigen::MatrixXd& state_action,
                                          const Eigen::VectorXd& taus,
                                          Cache* cache) const {
  if (state_action.rows() != input_dim())
    throw std::invalid_argument("QuantileCritic: state-action dim mismatch");
  const Eigen::Index n = state_action.cols();
  const Eigen::Index k = taus.size();

  const Eigen::MatrixXd cosf = cosine_features(taus, n_cos_);
  Eigen::MatrixXd psi, emb;
  if (cache) {
    psi = trunk_.forward(store, state_action, &cache->trunk);
    emb = embed_.forward(store, cosf, &cache->embed);
  } else {
    psi = trunk_.forward(store, state_action);
    emb = embed_.forward(store, cosf);
  }

  // fused columns are sample-major: column b*K + j
  Eigen::MatrixXd fused(hidden_, n * k);
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index j = 0; j < k; ++j)
      fused.col(b * k + j) = psi.col(b).cwiseProduct(emb.col(j));

  Eigen::MatrixXd out;
  if (cache) {
    out = head_.forward(store, fused, &cache->head);
    cache->psi = std::move(psi);
    cache->emb = std::move(emb);
    cache->taus = taus;
    cache->batch = n;
  } else {
    out = head_.forward(store, fused);
  }

  Eigen::MatrixXd z(k, n);
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index j = 0; j < k; ++j) z(j, b) = out(0, b * k + j);
  return z;
}

Eigen::MatrixXd QuantileCritic::backward(nn::ParamStore& store,
                                         const Cache& cache,
                                         const Eigen::MatrixXd& dZ) const {
  const Eigen::Index n = cache.batch;
  const Eigen::Index k = cache.taus.size();
  if (dZ.rows() != k || dZ.cols() != n)
    throw std::invalid_argument("QuantileCritic::backward: dZ shape");

  Eigen::MatrixXd dhead(1, n * k);
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index j = 0; j < k; ++j) dhead(0, b * k + j) = dZ(j, b);

  const Eigen::MatrixXd dfused = head_.backward(store, cache.head, dhead);

  Eigen::MatrixXd dpsi = Eigen::MatrixXd::Zero(hidden_, n);
  Eigen::MatrixXd demb = Eigen::MatrixXd::Zero(hidden_, k);
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index j = 0; j < k; ++j) {
      dpsi.col(b) += dfused.col(b * k + j).cwiseProduct(cache.emb.col(j));
      demb.col(j) += dfused.col(b * k + j).cwiseProduct(cache.psi.col(b));
    }

  embed_.backward(store, cache.embed, demb);
  return trunk_.backward(store, cache.trunk, dpsi);
}

Eigen::MatrixXd QuantileCritic::action_jvp(const nn::ParamStore& store,
                                           const Cache& cache) const {
  const Eigen::Index n = cache.batch;
  const Eigen::Index k = cache.taus.size();

  // unit tangent on the action row of every column
  Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(input_dim(), n);
  dx.row(state_dim_).setOnes();
  const Eigen::VectorXd no_dir;
  const Eigen::MatrixXd dpsi = trunk_.jvp(store, no_dir, cache.trunk, &dx);

  Eigen::MatrixXd dfused(hidden_, n * k);
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index j = 0; j < k; ++j)
      dfused.col(b * k + j) = dpsi.col(b).cwiseProduct(cache.emb.col(j));

  const Eigen::MatrixXd dout = head_.jvp(store, no_dir, cache.head, &dfused);

  Eigen::MatrixXd g(k, n);
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index j = 0; j < k; ++j) g(j, b) = dout(0, b * k + j);
  return g;
}

ScalarCritic::ScalarCritic(int state_dim, int hidden, std::string prefix)
    : state_dim_(state_dim),
      net_(nn::NetworkSpec::dense({state_dim + 1, hidden, hidden, 1},
                                  nn::Activation::Relu,
                                  nn::Activation::Identity),
           prefix) {}

void ScalarCritic::register_params(nn::ParamStore& store) const {
  net_.register_params(store);
}

void ScalarCritic::init_params(nn::ParamStore& store, Rng& rng) const {
  net_.init_params(store, rng);
}

Eigen::RowVectorXd ScalarCritic::values(const nn::ParamStore& store,
                                        const Eigen::MatrixXd& state_action,
                                        nn::Mlp::Cache* cache) const {
  return net_.forward(store, state_action, cache).row(0);
}

Eigen::MatrixXd ScalarCritic::backward(nn::ParamStore& store,
                                       const nn::Mlp::Cache& cache,
                                       const Eigen::RowVectorXd& dv) const {
  return net_.backward(store, cache, dv);
}

Eigen::MatrixXd batch_states(const std::vector<env::Experience>& batch,
                             bool next_state) {
  Eigen::MatrixXd s(4, batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b)
    s.col(static_cast<Eigen::Index>(b)) =
        next_state ? batch[b].s_next.features() : batch[b].s.features();
  return s;
}

Eigen::MatrixXd batch_state_actions(const std::vector<env::Experience>& batch) {
  Eigen::MatrixXd sa(5, batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    sa.block<4, 1>(0, static_cast<Eigen::Index>(b)) = batch[b].s.features();
    sa(4, static_cast<Eigen::Index>(b)) = batch[b].a;
  }
  return sa;
}

namespace {

// ascending sort permutation of one column
std::vector<Eigen::Index> sort_perm(const Eigen::VectorXd& v) {
  std::vector<Eigen::Index> p(v.size());
  std::iota(p.begin(), p.end(), 0);
  std::stable_sort(p.begin(), p.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return v(a) < v(b); });
  return p;
}

}  // namespace

CriticLossResult critic_loss_and_grad(
    const std::vector<env::Experience>& batch, const QuantileCritic& critic,
    nn::ParamStore& phi, const nn::ParamStore& phi_target,
    const nn::Mlp& actor, const nn::ParamStore& theta_next,
    const CriticLossConfig& cfg, Rng* fraction_rng) {
  if (batch.empty())
    throw std::invalid_argument("critic_loss_and_grad: empty batch");
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());

  QuantileSet online = cfg.random_fractions && fraction_rng
                           ? random_quantiles(cfg.k_online, *fraction_rng)
                           : even_quantiles(cfg.k_online);
  QuantileSet target = cfg.random_fractions && fraction_rng
                           ? random_quantiles(cfg.k_target, *fraction_rng)
                           : even_quantiles(cfg.k_target);
  const Eigen::Index k = online.midpoints.size();
  const Eigen::Index kp = target.midpoints.size();

  const Eigen::MatrixXd sa = batch_state_actions(batch);
  QuantileCritic::Cache cache;
  const Eigen::MatrixXd z = critic.quantiles(phi, sa, online.midpoints, &cache);

  // bootstrap target: next action from the (current or target) actor
  const Eigen::MatrixXd s_next = batch_states(batch, /*next_state=*/true);
  const Eigen::MatrixXd a_next = actor.forward(theta_next, s_next);
  Eigen::MatrixXd sa_next(5, n);
  sa_next.topRows(4) = s_next;
  sa_next.row(4) = a_next.row(0);
  const Eigen::MatrixXd z_next =
      critic.quantiles(phi_target, sa_next, target.midpoints);

  double loss = 0.0;
  Eigen::MatrixXd dz = Eigen::MatrixXd::Zero(k, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const auto perm = sort_perm(z.col(b));
    Eigen::VectorXd z_sorted(k);
    for (Eigen::Index j = 0; j < k; ++j) z_sorted(j) = z(perm[j], b);
    Eigen::VectorXd zn_sorted = z_next.col(b);
    std::sort(zn_sorted.data(), zn_sorted.data() + kp);

    const double r = batch[b].r.r;
    for (Eigen::Index j = 0; j < k; ++j) {
      const double tau = online.midpoints(j);
      double dslot = 0.0;
      for (Eigen::Index jp = 0; jp < kp; ++jp) {
        const double delta = r + cfg.gamma * zn_sorted(jp) - z_sorted(j);
        const double weight =
            cfg.paper_pair_weighting
                ? (online.midpoints(j) - target.midpoints(jp)) /
                      static_cast<double>(n)
                : 1.0 / (static_cast<double>(kp) * static_cast<double>(n));
        loss += weight * quantile_huber(delta, tau, cfg.kappa);
        // d loss / d z = -weight * rho'(delta)
        dslot -= weight * quantile_huber_grad(delta, tau, cfg.kappa);
      }
      dz(perm[j], b) += dslot;
    }
  }

  critic.backward(phi, cache, dz);
  online.values = z.col(0);
  std::sort(online.values.data(), online.values.data() + k);
  return {loss, online};
}

double scalar_critic_loss_and_grad(const std::vector<env::Experience>& batch,
                                   const ScalarCritic& critic,
                                   nn::ParamStore& phi,
                                   const nn::ParamStore& phi_target,
                                   const nn::Mlp& actor,
                                   const nn::ParamStore& theta_next,
                                   double gamma) {
  if (batch.empty())
    throw std::invalid_argument("scalar_critic_loss_and_grad: empty batch");
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());

  const Eigen::MatrixXd sa = batch_state_actions(batch);
  nn::Mlp::Cache cache;
  const Eigen::RowVectorXd q = critic.values(phi, sa, &cache);

  const Eigen::MatrixXd s_next = batch_states(batch, true);
  const Eigen::MatrixXd a_next = actor.forward(theta_next, s_next);
  Eigen::MatrixXd sa_next(5, n);
  sa_next.topRows(4) = s_next;
  sa_next.row(4) = a_next.row(0);
  const Eigen::RowVectorXd q_next = critic.values(phi_target, sa_next);

  double loss = 0.0;
  Eigen::RowVectorXd dq(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const double y = batch[b].r.r + gamma * q_next(b);
    const double err = q(b) - y;
    loss += err * err / static_cast<double>(n);
    dq(b) = 2.0 * err / static_cast<double>(n);
  }
  critic.backward(phi, cache, dq);
  return loss;
}

}  // namespace transit::agents
