#pragma once

#include <Eigen/Core>
#include <string>

#include "transit/nn/params.hpp"
#include "transit/rng.hpp"

namespace transit::nn {

// Single-head scaled dot-product attention: query from the ego vector,
// keys/values from the event columns. An empty event set yields a learned
// null-context vector instead.
class Attention {
 public:
  Attention() = default;
  Attention(int ego_dim, int event_dim, int attn_dim, std::string prefix);

  void register_params(ParamStore& store) const;
  void init_params(ParamStore& store, Rng& rng) const;

  struct Cache {
    Eigen::VectorXd ego;
    Eigen::MatrixXd events;  // event_dim x m
    Eigen::VectorXd query;
    Eigen::MatrixXd keys;
    Eigen::MatrixXd values;
    Eigen::VectorXd weights;  // softmax, empty when no events
  };

  Eigen::VectorXd forward(const ParamStore& store, const Eigen::VectorXd& ego,
                          const Eigen::MatrixXd& events, Cache* cache) const;

  void backward(ParamStore& store, const Cache& cache,
                const Eigen::VectorXd& dcontext) const;

  int context_dim() const { return attn_dim_; }
  int ego_dim() const { return ego_dim_; }
  int event_dim() const { return event_dim_; }

 private:
  std::string name(const char* leaf) const { return prefix_ + "." + leaf; }
  int ego_dim_ = 0;
  int event_dim_ = 0;
  int attn_dim_ = 0;
  std::string prefix_;
};

}  // namespace transit::nn
