#pragma once

#include <Eigen/Dense>
#include <functional>

namespace nvp1 {

// Damped Gauss-Newton (Levenberg-Marquardt) with a numerically
// differentiated Jacobian. Small and dense; all fits in this project have
// <= 8 parameters.
struct LmOptions {
  int max_iterations = 500;
  double ftol = 1e-10;          // relative objective decrease
  double xtol = 1e-12;          // relative step size
  double lambda0 = 1e-3;        // initial damping
  double diff_step_rel = 1e-6;  // Jacobian step, relative to |x_i|
  double diff_step_min = 1e-9;  // Jacobian step floor
};

struct LmResult {
  Eigen::VectorXd x;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd covariance;  // (J^T J)^-1 at the solution (unscaled)
  double cost = 0.0;           // 0.5 * ||r||^2
  int iterations = 0;
  bool converged = false;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

LmResult levenberg_marquardt(const ResidualFn& residual,
                             const Eigen::VectorXd& x0,
                             const LmOptions& options = {});

}  // namespace nvp1
