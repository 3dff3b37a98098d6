#pragma once

namespace transit::agents {

// Huber loss with threshold kappa.
double huber(double x, double kappa);
double huber_grad(double x, double kappa);

// Quantile Huber: |tau - 1{delta<0}| * huber(delta) / kappa.
double quantile_huber(double delta, double tau, double kappa);
double quantile_huber_grad(double delta, double tau, double kappa);

}  // namespace transit::agents
