#pragma once

#include <functional>

#include "transit/nn/params.hpp"

namespace transit::nn {

// Central finite differences of a scalar function over the store's
// current values. The store is restored afterwards.
Eigen::VectorXd numeric_gradient(ParamStore& store,
                                 const std::function<double()>& f,
                                 double eps = 1e-6);

// max_i |a_i - n_i| / max(1e-4, |a_i|, |n_i|) — relative where the
// gradient is large, floored near zero.
double max_rel_error(const Eigen::VectorXd& analytic,
                     const Eigen::VectorXd& numeric);

}  // namespace transit::nn
