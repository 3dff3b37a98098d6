#include "transit/agents/distortion.hpp"

#include <algorithm>
#include <stdexcept>

#include "transit/mathx.hpp"

namespace transit::agents {

Eigen::VectorXd QuantileSet::widths() const {
  const Eigen::Index k = fractions.size() - 1;
  Eigen::VectorXd w(k);
  for (Eigen::Index i = 0; i < k; ++i) w(i) = fractions(i + 1) - fractions(i);
  return w;
}

QuantileSet even_quantiles(int k) {
  if (k < 1) throw std::invalid_argument("even_quantiles: k must be >= 1");
  QuantileSet q;
  q.fractions.resize(k + 1);
  q.midpoints.resize(k);
  for (int i = 0; i <= k; ++i)
    q.fractions(i) = static_cast<double>(i) / static_cast<double>(k);
  for (int i = 0; i < k; ++i)
    q.midpoints(i) = 0.5 * (q.fractions(i) + q.fractions(i + 1));
  return q;
}

QuantileSet random_quantiles(int k, Rng& rng) {
  if (k < 1) throw std::invalid_argument("random_quantiles: k must be >= 1");
  QuantileSet q;
  q.fractions.resize(k + 1);
  for (int i = 0; i <= k; ++i) q.fractions(i) = rng.uniform();
  std::sort(q.fractions.data(), q.fractions.data() + k + 1);
  q.fractions(0) = 0.0;
  q.fractions(k) = 1.0;
  q.midpoints.resize(k);
  for (int i = 0; i < k; ++i)
    q.midpoints(i) = 0.5 * (q.fractions(i) + q.fractions(i + 1));
  return q;
}

Eigen::VectorXd wang_weights(double beta, const Eigen::VectorXd& midpoints) {
  Eigen::VectorXd w(midpoints.size());
  for (Eigen::Index i = 0; i < midpoints.size(); ++i) {
    const double t = midpoints(i);
    if (t <= 0.0 || t >= 1.0)
      throw std::invalid_argument("wang_weights: midpoints must be in (0,1)");
    const double x = norm_inv_cdf(t);
    // pdf(x+beta)/pdf(x), simplified to avoid the pdf ratio underflowing
    w(i) = std::exp(-beta * x - 0.5 * beta * beta);
  }
  return w;
}

Eigen::VectorXd uniform_weights(int k) { return Eigen::VectorXd::Ones(k); }

double distorted_q(const QuantileSet& quantiles,
                   const Eigen::VectorXd& weights) {
  const Eigen::Index k = quantiles.midpoints.size();
  if (quantiles.values.size() != k || weights.size() != k)
    throw std::invalid_argument("distorted_q: length mismatch");
  double q = 0.0;
  for (Eigen::Index i = 0; i < k; ++i)
    q += (quantiles.fractions(i + 1) - quantiles.fractions(i)) * weights(i) *
         quantiles.values(i);
  return q;
}

}  // namespace transit::agents
