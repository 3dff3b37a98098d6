#include "transit/agents/meta.hpp"

#include <cmath>
#include <stdexcept>

namespace transit::agents {

namespace {
constexpr int kEgoDim = 5;
constexpr int kEventDim = 7;
}  // namespace

MetaWeightNet::MetaWeightNet(int k, int attn_dim, int head_hidden,
                             std::string prefix)
    : k_(k),
      attn_dim_(attn_dim),
      attn_(kEgoDim, kEventDim, attn_dim, prefix + ".attn"),
      head_(nn::NetworkSpec::dense({attn_dim + kEgoDim + 1, head_hidden, k},
                                   nn::Activation::Relu,
                                   nn::Activation::Identity),
            prefix + ".head") {
  if (k < 1) throw std::invalid_argument("MetaWeightNet: k must be >= 1");
}

void MetaWeightNet::register_params(nn::ParamStore& store) const {
  attn_.register_params(store);
  head_.register_params(store);
}

void MetaWeightNet::init_params(nn::ParamStore& store, Rng& rng) const {
  attn_.init_params(store, rng);
  head_.init_params(store, rng);
}

double MetaWeightNet::count_feature(int n_events) {
  return std::log1p(static_cast<double>(n_events)) / std::log1p(8.0);
}

Eigen::VectorXd MetaWeightNet::weights(const nn::ParamStore& eta,
                                       const env::EventGraph& g,
                                       Cache* cache) const {
  const Eigen::MatrixXd events = g.event_matrix();
  const Eigen::VectorXd context =
      attn_.forward(eta, g.ego, events, cache ? &cache->attn : nullptr);

  Eigen::VectorXd head_in(attn_dim_ + kEgoDim + 1);
  head_in.head(attn_dim_) = context;
  head_in.segment(attn_dim_, kEgoDim) = g.ego;
  head_in(attn_dim_ + kEgoDim) = count_feature(g.event_count());

  const Eigen::VectorXd logits =
      head_.forward(eta, head_in, cache ? &cache->head : nullptr).col(0);

  Eigen::VectorXd shifted = logits.array() - logits.maxCoeff();
  Eigen::VectorXd probs = shifted.array().exp();
  probs /= probs.sum();
  if (cache) cache->probs = probs;
  return static_cast<double>(k_) * probs;
}

void MetaWeightNet::backward(nn::ParamStore& eta, const Cache& cache,
                             const Eigen::VectorXd& dweights) const {
  if (dweights.size() != k_)
    throw std::invalid_argument("MetaWeightNet::backward: size mismatch");
  const auto& p = cache.probs;
  const double mix = p.dot(dweights);
  const Eigen::VectorXd dlogits =
      static_cast<double>(k_) * (p.array() * (dweights.array() - mix)).matrix();

  const Eigen::MatrixXd dhead_in = head_.backward(eta, cache.head, dlogits);
  attn_.backward(eta, cache.attn, dhead_in.col(0).head(attn_dim_));
}

}  // namespace transit::agents
