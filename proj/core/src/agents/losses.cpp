#include "transit/agents/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace transit::agents {

double huber(double x, double kappa) {
  if (kappa <= 0) throw std::invalid_argument("huber: kappa must be > 0");
  const double ax = std::abs(x);
  if (ax < kappa) return 0.5 * x * x;
  return kappa * (ax - 0.5 * kappa);
}

double huber_grad(double x, double kappa) {
  if (kappa <= 0) throw std::invalid_argument("huber: kappa must be > 0");
  if (std::abs(x) < kappa) return x;
  return x > 0 ? kappa : -kappa;
}

double quantile_huber(double delta, double tau, double kappa) {
  if (tau < 0.0 || tau > 1.0)
    throw std::invalid_argument("quantile_huber: tau must be in [0,1]");
  const double asym = std::abs(tau - (delta < 0.0 ? 1.0 : 0.0));
  return asym * huber(delta, kappa) / kappa;
}

double quantile_huber_grad(double delta, double tau, double kappa) {
  if (tau < 0.0 || tau > 1.0)
    throw std::invalid_argument("quantile_huber: tau must be in [0,1]");
  const double asym = std::abs(tau - (delta < 0.0 ? 1.0 : 0.0));
  return asym * huber_grad(delta, kappa) / kappa;
}

}  // namespace transit::agents
