#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace transit::nn {

// Named matrix views over one flat parameter vector, with gradient and
// Adam moment companions of the same shape.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Eigen::Index offset;
    Eigen::Index rows;
    Eigen::Index cols;
  };

  // Registration happens before finalize(); afterwards the layout is fixed.
  void add(const std::string& name, Eigen::Index rows, Eigen::Index cols = 1);
  void finalize();
  bool finalized() const { return finalized_; }

  Eigen::Index size() const { return value.size(); }
  const std::vector<Entry>& entries() const { return entries_; }
  const Entry& entry(const std::string& name) const;
  bool has(const std::string& name) const;

  Eigen::Map<Eigen::MatrixXd> mat(const std::string& name);
  Eigen::Map<const Eigen::MatrixXd> mat(const std::string& name) const;
  Eigen::Map<Eigen::MatrixXd> grad_mat(const std::string& name);
  Eigen::Map<const Eigen::MatrixXd> grad_mat(const std::string& name) const;

  void zero_grad() { grad.setZero(); }

  Eigen::VectorXd value;
  Eigen::VectorXd grad;
  Eigen::VectorXd adam_m;
  Eigen::VectorXd adam_v;
  std::int64_t adam_steps = 0;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  Eigen::Index total_ = 0;
  bool finalized_ = false;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam on the accumulated gradient. Throws on non-finite
// gradients, naming the offending entry.
void adam_step(ParamStore& params, const AdamConfig& cfg, bool ascend = false);

// Plain gradient step (used for the actor so the meta gradient can
// differentiate through the exact update rule).
void sgd_step(ParamStore& params, double lr, bool ascend = false);

// target <- mix*source + (1-mix)*target, mix in (0, 1].
void copy_to_target(const ParamStore& source, ParamStore& target, double mix);

}  // namespace transit::nn
