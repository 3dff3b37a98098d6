#pragma once

#include <Eigen/Core>
#include <string>

#include "transit/env/env.hpp"
#include "transit/nn/attention.hpp"
#include "transit/nn/mlp.hpp"

namespace transit::agents {

// Maps an event graph to K distortion weights with mean exactly 1
// (softmax over K logits, scaled by K). The attention context is combined
// with the ego features and a saturating event-count feature before the
// head.
class MetaWeightNet {
 public:
  MetaWeightNet() = default;
  MetaWeightNet(int k, int attn_dim, int head_hidden, std::string prefix);

  void register_params(nn::ParamStore& store) const;
  void init_params(nn::ParamStore& store, Rng& rng) const;

  struct Cache {
    nn::Attention::Cache attn;
    nn::Mlp::Cache head;
    Eigen::VectorXd probs;  // softmax output, size K
  };

  Eigen::VectorXd weights(const nn::ParamStore& eta, const env::EventGraph& g,
                          Cache* cache = nullptr) const;

  void backward(nn::ParamStore& eta, const Cache& cache,
                const Eigen::VectorXd& dweights) const;

  int k() const { return k_; }
  static double count_feature(int n_events);

 private:
  int k_ = 32;
  int attn_dim_ = 32;
  nn::Attention attn_;
  nn::Mlp head_;
};

}  // namespace transit::agents
