#include "nvp1/least_squares.hpp"

#include <cmath>

namespace nvp1 {

namespace {

Eigen::MatrixXd numeric_jacobian(const ResidualFn& residual,
                                 const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& r0,
                                 const LmOptions& opt) {
  const int m = static_cast<int>(r0.size());
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd jac(m, n);
  for (int j = 0; j < n; ++j) {
    const double h = std::max(opt.diff_step_min, opt.diff_step_rel * std::abs(x(j)));
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    jac.col(j) = (residual(xp) - residual(xm)) / (2.0 * h);
  }
  return jac;
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFn& residual,
                             const Eigen::VectorXd& x0,
                             const LmOptions& opt) {
  LmResult out;
  out.x = x0;
  Eigen::VectorXd r = residual(out.x);
  double cost = 0.5 * r.squaredNorm();
  double lambda = opt.lambda0;

  for (int it = 0; it < opt.max_iterations; ++it) {
    out.iterations = it + 1;
    const Eigen::MatrixXd jac = numeric_jacobian(residual, out.x, r, opt);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;

    bool stepped = false;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd delta = damped.ldlt().solve(-jtr);
      const Eigen::VectorXd x_new = out.x + delta;
      const Eigen::VectorXd r_new = residual(x_new);
      const double cost_new = 0.5 * r_new.squaredNorm();
      if (std::isfinite(cost_new) && cost_new <= cost) {
        const double dcost = cost - cost_new;
        const double dx = delta.norm();
        out.x = x_new;
        r = r_new;
        const double prev = cost;
        cost = cost_new;
        lambda = std::max(lambda / 3.0, 1e-14);
        stepped = true;
        if (dcost <= opt.ftol * std::max(prev, 1e-300) ||
            dx <= opt.xtol * (out.x.norm() + opt.xtol)) {
          out.converged = true;
        }
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
    if (out.converged || !stepped) {
      // A failed line search at huge damping means a (local) stationary
      // point within numerical resolution; accept as converged if the
      // gradient is tiny, otherwise report non-convergence with the last
      // iterate in place.
      if (!stepped && jtr.norm() <= 1e-8 * std::max(1.0, std::sqrt(cost)))
        out.converged = true;
      break;
    }
  }

  out.residuals = r;
  out.cost = cost;
  const Eigen::MatrixXd jac = numeric_jacobian(residual, out.x, r, opt);
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  out.covariance = jtj.completeOrthogonalDecomposition().pseudoInverse();
  return out;
}

}  // namespace nvp1
