#include "nvp1/spectroscopy.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>

#include "nvp1/errors.hpp"
#include "nvp1/parallel.hpp"

namespace nvp1 {

TransitionTable transition_table(const P1Params& params, const FieldVector& field,
                                 double main_threshold, const PhysicalConstants& pc) {
  TransitionTable table;
  table.main_threshold = main_threshold;
  Eigen::Matrix2cd sx;
  sx << 0, 0.5, 0.5, 0;
  const Eigen::MatrixXcd sx6 =
      Eigen::kroneckerProduct(sx, Eigen::Matrix3cd::Identity());

  for (JtAxis axis : kAllJtAxes) {
    const EigenSystem eig = diagonalize(p1_hamiltonian(params, field, axis, pc));
    for (int i = 0; i < 6; ++i) {
      for (int j = i + 1; j < 6; ++j) {
        Transition t;
        t.freq_mhz = rad_us_to_mhz(eig.eigenvalues(j) - eig.eigenvalues(i));
        t.axis = axis;
        t.lower = eig.labels[i];
        t.upper = eig.labels[j];
        const std::complex<double> me =
            eig.eigenvectors.col(j).adjoint() * sx6 * eig.eigenvectors.col(i);
        t.intensity = 4.0 * std::norm(me);
        t.main = t.intensity >= main_threshold;
        table.entries.push_back(t);
      }
    }
  }
  std::sort(table.entries.begin(), table.entries.end(),
            [](const Transition& a, const Transition& b) {
              return a.freq_mhz < b.freq_mhz;
            });
  return table;
}

std::string transition_label(const Transition& t) {
  return std::string(1, jt_letter(t.axis)) + "|" + basis::p1_token(t.lower) +
         ">" + basis::p1_token(t.upper);
}

void validate(const SpectrumData& s) {
  if (s.freq_mhz.size() != s.signal.size())
    throw SchemaError("spectrum: frequency/signal length mismatch");
  if (!s.sigma.empty() && s.sigma.size() != s.signal.size())
    throw SchemaError("spectrum: sigma length mismatch");
  for (std::size_t i = 1; i < s.freq_mhz.size(); ++i)
    if (!(s.freq_mhz[i] > s.freq_mhz[i - 1]))
      throw SchemaError("spectrum: frequency grid must be strictly increasing");
}

std::vector<DipCenter> extract_dip_centers(const SpectrumData& spectrum,
                                           const std::vector<DipWindow>& windows) {
  validate(spectrum);
  std::vector<DipCenter> out;
  out.reserve(windows.size());

  for (const DipWindow& w : windows) {
    std::vector<double> x, y, sg;
    for (std::size_t i = 0; i < spectrum.freq_mhz.size(); ++i) {
      if (spectrum.freq_mhz[i] < w.fmin_mhz || spectrum.freq_mhz[i] > w.fmax_mhz)
        continue;
      x.push_back(spectrum.freq_mhz[i]);
      y.push_back(spectrum.signal[i]);
      sg.push_back(spectrum.sigma.empty() ? 1.0 : spectrum.sigma[i]);
    }
    DipCenter c;
    if (x.size() < 5) {
      c.flag = "window has fewer than 5 points";
      out.push_back(c);
      continue;
    }

    // Weighted quadratic y = a x'^2 + b x' + d around the window midpoint
    // (shifting keeps the normal equations well conditioned).
    const double x0 = 0.5 * (w.fmin_mhz + w.fmax_mhz);
    Eigen::MatrixXd design(x.size(), 3);
    Eigen::VectorXd rhs(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = x[i] - x0;
      const double wgt = 1.0 / sg[i];
      design(i, 0) = wgt * t * t;
      design(i, 1) = wgt * t;
      design(i, 2) = wgt;
      rhs(i) = wgt * y[i];
    }
    const Eigen::Matrix3d ata = design.transpose() * design;
    const Eigen::Vector3d atb = design.transpose() * rhs;
    const Eigen::Vector3d coef = ata.ldlt().solve(atb);
    const double a = coef(0), b = coef(1);

    if (!(a > 0.0)) {
      c.flag = "fit is not concave-up (no minimum)";
      out.push_back(c);
      continue;
    }
    const double vertex = x0 - b / (2.0 * a);
    if (vertex < w.fmin_mhz || vertex > w.fmax_mhz) {
      c.flag = "vertex outside window";
      out.push_back(c);
      continue;
    }

    Eigen::Matrix3d cov = ata.inverse();
    if (spectrum.sigma.empty()) {
      // Scale by reduced chi^2 when no uncertainties were given.
      const Eigen::VectorXd resid = design * coef - rhs;
      const double dof = static_cast<double>(x.size()) - 3.0;
      cov *= resid.squaredNorm() / std::max(dof, 1.0);
    }
    // vertex = x0 - b/(2a): propagate through (a, b).
    const double dv_da = b / (2.0 * a * a);
    const double dv_db = -1.0 / (2.0 * a);
    const double var = dv_da * dv_da * cov(0, 0) + dv_db * dv_db * cov(1, 1) +
                       2.0 * dv_da * dv_db * cov(0, 1);
    c.center_mhz = vertex;
    c.stderr_mhz = std::sqrt(std::max(var, 0.0));
    c.ok = true;
    out.push_back(c);
  }
  return out;
}

std::array<double, 4> plus1_frequencies(const P1Params& params,
                                        const FieldVector& field,
                                        const PhysicalConstants& pc) {
  std::array<double, 4> f{};
  for (int a = 0; a < 4; ++a) {
    const Matrix6cd h = p1_hamiltonian(params, field, kAllJtAxes[a], pc);
    Eigen::SelfAdjointEigenSolver<Matrix6cd> solver(h);
    const auto& ev = solver.eigenvalues();
    f[a] = rad_us_to_mhz(ev(5) - ev(0));
  }
  return f;
}

BruteForceResult bruteforce_field_estimate(
    const std::array<double, 4>& sorted_freqs_mhz, const P1Params& init_params,
    const FieldGrid& grid, int threads, const PhysicalConstants& pc) {
  const auto count = [&](double lo, double hi) {
    return static_cast<long>(std::floor((hi - lo) / grid.step + 1e-9)) + 1;
  };
  const long nx = count(grid.bx_min, grid.bx_max);
  const long ny = count(grid.by_min, grid.by_max);
  const long nz = count(grid.bz_min, grid.bz_max);
  if (nx < 1 || ny < 1 || nz < 1 || grid.step <= 0.0)
    throw SchemaError("bruteforce_field_estimate: empty grid");

  std::array<double, 4> target = sorted_freqs_mhz;
  std::sort(target.begin(), target.end());

  struct Cell {
    double delta = std::numeric_limits<double>::infinity();
    long index = -1;
  };
  std::vector<Cell> best_per_x(nx);

  parallel_for(static_cast<std::size_t>(nx), threads, [&](std::size_t ix) {
    const double bx = grid.bx_min + grid.step * static_cast<double>(ix);
    Cell best;
    for (long iy = 0; iy < ny; ++iy) {
      const double by = grid.by_min + grid.step * static_cast<double>(iy);
      for (long iz = 0; iz < nz; ++iz) {
        const double bz = grid.bz_min + grid.step * static_cast<double>(iz);
        std::array<double, 4> f =
            plus1_frequencies(init_params, FieldVector(bx, by, bz), pc);
        std::sort(f.begin(), f.end());
        double delta = 0.0;
        for (int k = 0; k < 4; ++k) {
          const double d = f[k] - target[k];
          delta += d * d;
        }
        const long lin = (static_cast<long>(ix) * ny + iy) * nz + iz;
        if (delta < best.delta || (delta == best.delta && lin < best.index)) {
          best.delta = delta;
          best.index = lin;
        }
      }
    }
    best_per_x[ix] = best;
  });

  Cell best;
  for (const Cell& c : best_per_x)
    if (c.delta < best.delta || (c.delta == best.delta && c.index < best.index))
      best = c;

  const long iz = best.index % nz;
  const long iy = (best.index / nz) % ny;
  const long ix = best.index / (ny * nz);
  BruteForceResult out;
  out.field = FieldVector(grid.bx_min + grid.step * static_cast<double>(ix),
                          grid.by_min + grid.step * static_cast<double>(iy),
                          grid.bz_min + grid.step * static_cast<double>(iz));
  out.delta_mhz2 = best.delta;
  out.on_boundary = (ix == 0 || ix == nx - 1 || iy == 0 || iy == ny - 1 ||
                     iz == 0 || iz == nz - 1);
  return out;
}

namespace {

double assigned_frequency(const P1Params& params, const FieldVector& field,
                          const DipAssignment& dip, const PhysicalConstants& pc) {
  const EigenSystem eig =
      diagonalize(p1_hamiltonian(params, field, dip.axis, pc));
  return rad_us_to_mhz(eig.transition_rad_us(dip.lower, dip.upper));
}

}  // namespace

FitResult fit_hamiltonian(const std::vector<DipAssignment>& dips,
                          const P1Params& init_params, const FieldVector& init_field,
                          const PhysicalConstants& pc) {
  if (dips.size() < 6)
    throw InfeasibleError("fit_hamiltonian: need at least 6 assigned dips for 6 "
                          "free parameters, got " + std::to_string(dips.size()));

  Eigen::VectorXd weights(dips.size());
  for (std::size_t i = 0; i < dips.size(); ++i)
    weights(i) = dips[i].sigma_mhz > 0.0 ? 1.0 / dips[i].sigma_mhz : 1.0;

  const ResidualFn residual = [&](const Eigen::VectorXd& x) {
    const P1Params p{x(0), x(1), x(2)};
    const FieldVector b(x(3), x(4), x(5));
    Eigen::VectorXd r(dips.size());
    for (std::size_t i = 0; i < dips.size(); ++i)
      r(i) = weights(i) * (assigned_frequency(p, b, dips[i], pc) - dips[i].freq_mhz);
    return r;
  };

  Eigen::VectorXd x0(6);
  x0 << init_params.a_par_mhz, init_params.a_perp_mhz, init_params.p_par_mhz,
      init_field(0), init_field(1), init_field(2);
  const LmResult lm = levenberg_marquardt(residual, x0);
  if (!lm.converged)
    throw ConvergenceError(
        "fit_hamiltonian did not converge; last iterate A_par=" +
        std::to_string(lm.x(0)) + " A_perp=" + std::to_string(lm.x(1)) +
        " P_par=" + std::to_string(lm.x(2)));

  FitResult out;
  out.params = {lm.x(0), lm.x(1), lm.x(2)};
  out.field = FieldVector(lm.x(3), lm.x(4), lm.x(5));
  out.residuals_mhz.resize(dips.size());
  for (std::size_t i = 0; i < dips.size(); ++i)
    out.residuals_mhz(i) =
        dips[i].freq_mhz - assigned_frequency(out.params, out.field, dips[i], pc);
  out.covariance = lm.covariance;
  for (int i = 0; i < 6; ++i) out.stderrs[i] = std::sqrt(lm.covariance(i, i));
  out.iterations = lm.iterations;
  out.converged = true;
  return out;
}

FieldVector estimate_field_from_p1(const std::array<double, 4>& freqs_mhz_by_axis,
                                   const P1Params& params,
                                   const FieldVector& init_field,
                                   const PhysicalConstants& pc) {
  const ResidualFn residual = [&](const Eigen::VectorXd& x) {
    const auto f = plus1_frequencies(params, FieldVector(x(0), x(1), x(2)), pc);
    Eigen::VectorXd r(4);
    for (int a = 0; a < 4; ++a) r(a) = f[a] - freqs_mhz_by_axis[a];
    return r;
  };
  Eigen::VectorXd x0(3);
  x0 << init_field(0), init_field(1), init_field(2);
  const LmResult lm = levenberg_marquardt(residual, x0);
  if (!lm.converged)
    throw ConvergenceError("estimate_field_from_p1 did not converge");
  return FieldVector(lm.x(0), lm.x(1), lm.x(2));
}

double effective_gyromagnetic(const P1Params& params, const FieldVector& field,
                              JtAxis axis, int lower_label, int upper_label,
                              int component, double step_gauss,
                              const PhysicalConstants& pc) {
  if (component < 0 || component > 2)
    throw std::invalid_argument("effective_gyromagnetic: component must be 0..2");
  if (!(step_gauss > 0.0))
    throw std::invalid_argument("effective_gyromagnetic: step must be > 0");

  FieldVector bp = field, bm = field;
  bp(component) += step_gauss;
  bm(component) -= step_gauss;
  const double fp = diagonalize(p1_hamiltonian(params, bp, axis, pc))
                        .transition_rad_us(lower_label, upper_label);
  const double fm = diagonalize(p1_hamiltonian(params, bm, axis, pc))
                        .transition_rad_us(lower_label, upper_label);
  const double scale = std::max(std::abs(fp), std::abs(fm));
  if (std::abs(fp - fm) < 1e3 * std::numeric_limits<double>::epsilon() * scale)
    throw ConvergenceError(
        "effective_gyromagnetic: step too small, difference at eigensolver "
        "noise level");
  return (fp - fm) / (2.0 * step_gauss);
}

}  // namespace nvp1
