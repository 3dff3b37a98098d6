#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "transit/nn/params.hpp"
#include "transit/rng.hpp"

namespace transit::nn {

enum class Activation { Identity, Relu, Tanh, Sigmoid };

Activation activation_from_string(const std::string& name);
const char* to_string(Activation a);

struct LayerSpec {
  int in;
  int out;
  Activation act;
};

struct NetworkSpec {
  std::vector<LayerSpec> layers;

  // dense({4, 64, 64, 1}, Relu, Sigmoid): hidden activations then output.
  static NetworkSpec dense(const std::vector<int>& widths, Activation hidden,
                           Activation output);
  int input_dim() const { return layers.front().in; }
  int output_dim() const { return layers.back().out; }
  void validate() const;
};

// Plain dense network over a named parameter slice; inputs are column
// batches. Backward is exact reverse mode against the cached forward.
class Mlp {
 public:
  Mlp() = default;
  Mlp(NetworkSpec spec, std::string prefix);

  void register_params(ParamStore& store) const;
  void init_params(ParamStore& store, Rng& rng) const;

  struct Cache {
    std::vector<Eigen::MatrixXd> inputs;   // per layer
    std::vector<Eigen::MatrixXd> preacts;  // per layer
    Eigen::Index batch = 0;
  };

  Eigen::MatrixXd forward(const ParamStore& store, const Eigen::MatrixXd& x,
                          Cache* cache = nullptr) const;

  // Accumulates parameter gradients, returns dLoss/dInput.
  Eigen::MatrixXd backward(ParamStore& store, const Cache& cache,
                           const Eigen::MatrixXd& dy) const;

  // Tangent (JVP) along a flat parameter direction aligned with `store`,
  // optionally combined with an input tangent dx.
  Eigen::MatrixXd jvp(const ParamStore& store, const Eigen::VectorXd& dir,
                      const Cache& cache,
                      const Eigen::MatrixXd* dx = nullptr) const;

  const NetworkSpec& spec() const { return spec_; }
  std::string weight_name(std::size_t layer) const;
  std::string bias_name(std::size_t layer) const;

 private:
  NetworkSpec spec_;
  std::string prefix_;
};

Eigen::MatrixXd apply_activation(Activation act, const Eigen::MatrixXd& pre);
Eigen::MatrixXd activation_derivative(Activation act,
                                      const Eigen::MatrixXd& pre);

}  // namespace transit::nn
