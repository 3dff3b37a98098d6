#include "transit/nn/attention.hpp"

#include <cmath>
#include <stdexcept>

namespace transit::nn {

Attention::Attention(int ego_dim, int event_dim, int attn_dim,
                     std::string prefix)
    : ego_dim_(ego_dim),
      event_dim_(event_dim),
      attn_dim_(attn_dim),
      prefix_(std::move(prefix)) {
  if (ego_dim < 1 || event_dim < 1 || attn_dim < 1)
    throw std::invalid_argument("Attention: dims must be positive");
}

void Attention::register_params(ParamStore& store) const {
  store.add(name("Wq"), attn_dim_, ego_dim_);
  store.add(name("Wk"), attn_dim_, event_dim_);
  store.add(name("Wv"), attn_dim_, event_dim_);
  store.add(name("null"), attn_dim_, 1);
}

void Attention::init_params(ParamStore& store, Rng& rng) const {
  auto fill = [&](const std::string& n, int fan_in, int fan_out) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    auto m = store.mat(n);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        m(r, c) = rng.uniform(-bound, bound);
  };
  fill(name("Wq"), ego_dim_, attn_dim_);
  fill(name("Wk"), event_dim_, attn_dim_);
  fill(name("Wv"), event_dim_, attn_dim_);
  fill(name("null"), 1, attn_dim_);
}

Eigen::VectorXd Attention::forward(const ParamStore& store,
                                   const Eigen::VectorXd& ego,
                                   const Eigen::MatrixXd& events,
                                   Cache* cache) const {
  if (ego.size() != ego_dim_)
    throw std::invalid_argument("Attention: ego dim mismatch");
  if (events.cols() > 0 && events.rows() != event_dim_)
    throw std::invalid_argument("Attention: event dim mismatch");

  if (cache) {
    cache->ego = ego;
    cache->events = events;
  }

  if (events.cols() == 0) {
    if (cache) cache->weights.resize(0);
    return store.mat(name("null")).col(0);
  }

  const Eigen::VectorXd q = store.mat(name("Wq")) * ego;
  const Eigen::MatrixXd k = store.mat(name("Wk")) * events;
  const Eigen::MatrixXd v = store.mat(name("Wv")) * events;

  const double scale = 1.0 / std::sqrt(static_cast<double>(attn_dim_));
  Eigen::VectorXd scores = (k.transpose() * q) * scale;
  scores.array() -= scores.maxCoeff();
  Eigen::VectorXd weights = scores.array().exp();
  weights /= weights.sum();

  if (cache) {
    cache->query = q;
    cache->keys = k;
    cache->values = v;
    cache->weights = weights;
  }
  return v * weights;
}

void Attention::backward(ParamStore& store, const Cache& cache,
                         const Eigen::VectorXd& dcontext) const {
  if (cache.events.cols() == 0) {
    store.grad_mat(name("null")).col(0) += dcontext;
    return;
  }

  const auto& alpha = cache.weights;
  const auto& v = cache.values;
  const auto& k = cache.keys;
  const auto& q = cache.query;
  const double scale = 1.0 / std::sqrt(static_cast<double>(attn_dim_));

  // context = V * alpha
  const Eigen::VectorXd dalpha = v.transpose() * dcontext;
  const Eigen::MatrixXd dv = dcontext * alpha.transpose();

  // softmax jacobian
  const double dot = alpha.dot(dalpha);
  const Eigen::VectorXd dscores =
      (alpha.array() * (dalpha.array() - dot)).matrix();

  const Eigen::VectorXd dq = (k * dscores) * scale;
  const Eigen::MatrixXd dk = (q * dscores.transpose()) * scale;

  store.grad_mat(name("Wq")).noalias() += dq * cache.ego.transpose();
  store.grad_mat(name("Wk")).noalias() += dk * cache.events.transpose();
  store.grad_mat(name("Wv")).noalias() += dv * cache.events.transpose();
}

}  // namespace transit::nn
