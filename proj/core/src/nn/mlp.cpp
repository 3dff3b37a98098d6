#include "transit/nn/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace transit::nn {

Activation activation_from_string(const std::string& name) {
  if (name == "identity" || name == "linear") return Activation::Identity;
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw std::invalid_argument("unknown activation: " + name);
}

const char* to_string(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "?";
}

NetworkSpec NetworkSpec::dense(const std::vector<int>& widths,
                               Activation hidden, Activation output) {
  if (widths.size() < 2)
    throw std::invalid_argument("NetworkSpec: need at least one layer");
  NetworkSpec spec;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const bool last = (i + 2 == widths.size());
    spec.layers.push_back({widths[i], widths[i + 1], last ? output : hidden});
  }
  spec.validate();
  return spec;
}

void NetworkSpec::validate() const {
  if (layers.empty()) throw std::invalid_argument("NetworkSpec: empty");
  for (const auto& l : layers)
    if (l.in < 1 || l.out < 1)
      throw std::invalid_argument("NetworkSpec: non-positive layer dim");
  for (std::size_t i = 1; i < layers.size(); ++i)
    if (layers[i].in != layers[i - 1].out)
      throw std::invalid_argument("NetworkSpec: incompatible layer dims");
}

Eigen::MatrixXd apply_activation(Activation act, const Eigen::MatrixXd& pre) {
  switch (act) {
    case Activation::Identity: return pre;
    case Activation::Relu: return pre.cwiseMax(0.0);
    case Activation::Tanh: return pre.array().tanh().matrix();
    case Activation::Sigmoid:
      return (1.0 / (1.0 + (-pre.array()).exp())).matrix();
  }
  return pre;
}

Eigen::MatrixXd activation_derivative(Activation act,
                                      const Eigen::MatrixXd& pre) {
  switch (act) {
    case Activation::Identity:
      return Eigen::MatrixXd::Ones(pre.rows(), pre.cols());
    case Activation::Relu:
      return (pre.array() > 0.0).cast<double>().matrix();
    case Activation::Tanh: {
      const Eigen::ArrayXXd t = pre.array().tanh();
      return (1.0 - t.square()).matrix();
    }
    case Activation::Sigmoid: {
      const Eigen::ArrayXXd s = 1.0 / (1.0 + (-pre.array()).exp());
      return (s * (1.0 - s)).matrix();
    }
  }
  return Eigen::MatrixXd::Ones(pre.rows(), pre.cols());
}

Mlp::Mlp(NetworkSpec spec, std::string prefix)
    : spec_(std::move(spec)), prefix_(std::move(prefix)) {
  spec_.validate();
}

std::string Mlp::weight_name(std::size_t layer) const {
  return prefix_ + ".L" + std::to_string(layer) + ".W";
}

std::string Mlp::bias_name(std::size_t layer) const {
  return prefix_ + ".L" + std::to_string(layer) + ".b";
}

void Mlp::register_params(ParamStore& store) const {
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    store.add(weight_name(i), spec_.layers[i].out, spec_.layers[i].in);
    store.add(bias_name(i), spec_.layers[i].out, 1);
  }
}

void Mlp::init_params(ParamStore& store, Rng& rng) const {
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    const auto& l = spec_.layers[i];
    // He-uniform for ReLU layers, Glorot-uniform otherwise
    const double bound = l.act == Activation::Relu
                             ? std::sqrt(6.0 / l.in)
                             : std::sqrt(6.0 / (l.in + l.out));
    auto w = store.mat(weight_name(i));
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r)
        w(r, c) = rng.uniform(-bound, bound);
    store.mat(bias_name(i)).setZero();
  }
}

Eigen::MatrixXd Mlp::forward(const ParamStore& store, const Eigen::MatrixXd& x,
                             Cache* cache) const {
  if (x.rows() != spec_.input_dim())
    throw std::invalid_argument("Mlp::forward: input dim mismatch");
  if (cache) {
    cache->inputs.clear();
    cache->preacts.clear();
    cache->batch = x.cols();
  }
  Eigen::MatrixXd h = x;
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    const auto w = store.mat(weight_name(i));
    const auto b = store.mat(bias_name(i));
    Eigen::MatrixXd pre = (w * h).colwise() + Eigen::VectorXd(b);
    if (cache) {
      cache->inputs.push_back(std::move(h));
      cache->preacts.push_back(pre);
    }
    h = apply_activation(spec_.layers[i].act, pre);
  }
  return h;
}

Eigen::MatrixXd Mlp::backward(ParamStore& store, const Cache& cache,
                              const Eigen::MatrixXd& dy) const {
  if (cache.inputs.size() != spec_.layers.size())
    throw std::logic_error("Mlp::backward: stale cache");
  if (dy.rows() != spec_.output_dim() || dy.cols() != cache.batch)
    throw std::invalid_argument("Mlp::backward: dy shape mismatch");

  Eigen::MatrixXd grad = dy;
  for (int i = static_cast<int>(spec_.layers.size()) - 1; i >= 0; --i) {
    const Eigen::MatrixXd dpre = grad.cwiseProduct(
        activation_derivative(spec_.layers[i].act, cache.preacts[i]));
    store.grad_mat(weight_name(i)).noalias() +=
        dpre * cache.inputs[i].transpose();
    store.grad_mat(bias_name(i)).noalias() += dpre.rowwise().sum();
    grad.noalias() = store.mat(weight_name(i)).transpose() * dpre;
  }
  return grad;
}

Eigen::MatrixXd Mlp::jvp(const ParamStore& store, const Eigen::VectorXd& dir,
                         const Cache& cache, const Eigen::MatrixXd* dx) const {
  // An empty direction means an input-only tangent.
  const bool with_params = dir.size() > 0;
  if (with_params && dir.size() != store.size())
    throw std::invalid_argument("Mlp::jvp: direction size mismatch");
  if (cache.inputs.size() != spec_.layers.size())
    throw std::logic_error("Mlp::jvp: stale cache");

  Eigen::MatrixXd tangent =
      dx ? *dx
         : Eigen::MatrixXd::Zero(spec_.input_dim(), cache.batch);
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    Eigen::MatrixXd dpre = store.mat(weight_name(i)) * tangent;
    if (with_params) {
      const auto we = store.entry(weight_name(i));
      const auto be = store.entry(bias_name(i));
      const Eigen::Map<const Eigen::MatrixXd> dw(dir.data() + we.offset,
                                                 we.rows, we.cols);
      const Eigen::Map<const Eigen::MatrixXd> db(dir.data() + be.offset,
                                                 be.rows, be.cols);
      dpre.noalias() += dw * cache.inputs[i];
      dpre.colwise() += Eigen::VectorXd(db);
    }
    tangent = dpre.cwiseProduct(
        activation_derivative(spec_.layers[i].act, cache.preacts[i]));
  }
  return tangent;
}

}  // namespace transit::nn
