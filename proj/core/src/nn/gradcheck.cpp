#include "transit/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace transit::nn {

Eigen::VectorXd numeric_gradient(ParamStore& store,
                                 const std::function<double()>& f,
                                 double eps) {
  Eigen::VectorXd grad(store.size());
  for (Eigen::Index i = 0; i < store.size(); ++i) {
    const double saved = store.value(i);
    store.value(i) = saved + eps;
    const double up = f();
    store.value(i) = saved - eps;
    const double down = f();
    store.value(i) = saved;
    grad(i) = (up - down) / (2.0 * eps);
  }
  return grad;
}

double max_rel_error(const Eigen::VectorXd& analytic,
                     const Eigen::VectorXd& numeric) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    // floor keeps the check meaningful for near-zero gradients without
    // amplifying finite-difference roundoff
    const double denom =
        std::max({1e-4, std::abs(analytic(i)), std::abs(numeric(i))});
    worst = std::max(worst, std::abs(analytic(i) - numeric(i)) / denom);
  }
  return worst;
}

}  // namespace transit::nn
