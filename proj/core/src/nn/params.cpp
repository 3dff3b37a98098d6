#include "transit/nn/params.hpp"

#include <cmath>
#include <stdexcept>

namespace transit::nn {

void ParamStore::add(const std::string& name, Eigen::Index rows,
                     Eigen::Index cols) {
  if (finalized_) throw std::logic_error("ParamStore: add after finalize");
  if (index_.count(name)) throw std::logic_error("ParamStore: duplicate " + name);
  index_[name] = entries_.size();
  entries_.push_back({name, total_, rows, cols});
  total_ += rows * cols;
}

void ParamStore::finalize() {
  value = Eigen::VectorXd::Zero(total_);
  grad = Eigen::VectorXd::Zero(total_);
  adam_m = Eigen::VectorXd::Zero(total_);
  adam_v = Eigen::VectorXd::Zero(total_);
  finalized_ = true;
}

const ParamStore::Entry& ParamStore::entry(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end())
    throw std::out_of_range("ParamStore: unknown entry " + name);
  return entries_[it->second];
}

bool ParamStore::has(const std::string& name) const {
  return index_.count(name) > 0;
}

Eigen::Map<Eigen::MatrixXd> ParamStore::mat(const std::string& name) {
  const Entry& e = entry(name);
  return {value.data() + e.offset, e.rows, e.cols};
}

Eigen::Map<const Eigen::MatrixXd> ParamStore::mat(
    const std::string& name) const {
  const Entry& e = entry(name);
  return {value.data() + e.offset, e.rows, e.cols};
}

Eigen::Map<Eigen::MatrixXd> ParamStore::grad_mat(const std::string& name) {
  const Entry& e = entry(name);
  return {grad.data() + e.offset, e.rows, e.cols};
}

Eigen::Map<const Eigen::MatrixXd> ParamStore::grad_mat(
    const std::string& name) const {
  const Entry& e = entry(name);
  return {grad.data() + e.offset, e.rows, e.cols};
}

namespace {
void check_finite_grad(const ParamStore& params) {
  if (params.grad.allFinite()) return;
  for (const auto& e : params.entries()) {
    const auto block = params.grad.segment(e.offset, e.rows * e.cols);
    if (!block.allFinite())
      throw std::runtime_error("non-finite gradient in parameter '" + e.name +
                               "'");
  }
  throw std::runtime_error("non-finite gradient");
}
}  // namespace

void adam_step(ParamStore& params, const AdamConfig& cfg, bool ascend) {
  check_finite_grad(params);
  params.adam_steps += 1;
  const double t = static_cast<double>(params.adam_steps);
  params.adam_m = cfg.beta1 * params.adam_m + (1.0 - cfg.beta1) * params.grad;
  params.adam_v =
      cfg.beta2 * params.adam_v.array().matrix() +
      (1.0 - cfg.beta2) * params.grad.array().square().matrix();
  const double mc = 1.0 - std::pow(cfg.beta1, t);
  const double vc = 1.0 - std::pow(cfg.beta2, t);
  const Eigen::ArrayXd mhat = params.adam_m.array() / mc;
  const Eigen::ArrayXd vhat = params.adam_v.array() / vc;
  const Eigen::ArrayXd step = cfg.lr * mhat / (vhat.sqrt() + cfg.eps);
  if (ascend)
    params.value.array() += step;
  else
    params.value.array() -= step;
  if (!params.value.allFinite())
    throw std::runtime_error("adam_step produced non-finite parameters");
}

void sgd_step(ParamStore& params, double lr, bool ascend) {
  check_finite_grad(params);
  if (ascend)
    params.value += lr * params.grad;
  else
    params.value -= lr * params.grad;
  if (!params.value.allFinite())
    throw std::runtime_error("sgd_step produced non-finite parameters");
}

void copy_to_target(const ParamStore& source, ParamStore& target, double mix) {
  if (mix <= 0.0 || mix > 1.0)
    throw std::invalid_argument("copy_to_target: mix must be in (0,1]");
  if (source.size() != target.size())
    throw std::invalid_argument("copy_to_target: shape mismatch");
  target.value = mix * source.value + (1.0 - mix) * target.value;
}

}  // namespace transit::nn
