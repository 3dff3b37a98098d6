#pragma once

#include <Eigen/Core>

#include "transit/rng.hpp"

namespace transit::agents {

// Quantile fractions (K+1 boundaries), their midpoints (K) and, once a
// critic has been evaluated, the value samples at the midpoints. Values
// are kept ascending after the sort step of a training update.
struct QuantileSet {
  Eigen::VectorXd fractions;  // ascending in [0,1], size K+1
  Eigen::VectorXd midpoints;  // size K
  Eigen::VectorXd values;     // size K, empty until evaluated

  Eigen::VectorXd widths() const;  // fraction gaps, size K
};

// Evenly spaced boundary grid k/K with its midpoints.
QuantileSet even_quantiles(int k);

// Optional mode: K+1 sorted uniform boundaries pinned to 0 and 1.
QuantileSet random_quantiles(int k, Rng& rng);

// Derivative of the Wang transform at each midpoint:
// g'(t) = pdf(invcdf(t) + beta) / pdf(invcdf(t)). beta > 0 down-weights
// larger quantiles, beta < 0 up-weights them.
Eigen::VectorXd wang_weights(double beta, const Eigen::VectorXd& midpoints);

Eigen::VectorXd uniform_weights(int k);

// Weighted quantile average: sum_i (tau_{i+1}-tau_i) * w_i * Z_i.
double distorted_q(const QuantileSet& quantiles,
                   const Eigen::VectorXd& weights);

}  // namespace transit::agents
