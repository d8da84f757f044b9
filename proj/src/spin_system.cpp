#include "nvp1/spin_system.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "nvp1/errors.hpp"

namespace nvp1 {

namespace {

using std::complex;
const complex<double> kI(0.0, 1.0);

Eigen::Matrix2cd sx2() {
  Eigen::Matrix2cd m;
  m << 0, 0.5, 0.5, 0;
  return m;
}
Eigen::Matrix2cd sy2() {
  Eigen::Matrix2cd m;
  m << 0, -0.5 * kI, 0.5 * kI, 0;
  return m;
}
Eigen::Matrix2cd sz2() {
  Eigen::Matrix2cd m;
  m << 0.5, 0, 0, -0.5;
  return m;
}

Eigen::Matrix3cd jx3() {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix3cd m;
  m << 0, s, 0, s, 0, s, 0, s, 0;
  return m;
}
Eigen::Matrix3cd jy3() {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix3cd m;
  m << 0, -s * kI, 0, s * kI, 0, -s * kI, 0, s * kI, 0;
  return m;
}
Eigen::Matrix3cd jz3() {
  Eigen::Matrix3cd m;
  m << 1, 0, 0, 0, 0, 0, 0, 0, -1;
  return m;
}

std::array<Eigen::Matrix2cd, 3> spin_half() { return {sx2(), sy2(), sz2()}; }
std::array<Eigen::Matrix3cd, 3> spin_one() { return {jx3(), jy3(), jz3()}; }

}  // namespace

JtAngles jt_angles(JtAxis axis) {
  switch (axis) {
    case JtAxis::A: return {109.5, 240.0};
    case JtAxis::B: return {109.5, 120.0};
    case JtAxis::C: return {109.5, 0.0};
    case JtAxis::D: return {0.0, 0.0};
  }
  throw std::invalid_argument("unknown JT axis");
}

char jt_letter(JtAxis axis) {
  return "ABCD"[static_cast<int>(axis)];
}

JtAxis jt_from_letter(char c) {
  switch (c) {
    case 'A': case 'a': return JtAxis::A;
    case 'B': case 'b': return JtAxis::B;
    case 'C': case 'c': return JtAxis::C;
    case 'D': case 'd': return JtAxis::D;
  }
  throw std::invalid_argument(std::string("unknown JT axis letter: ") + c);
}

P1Params fitted_p1_params() { return {114.0264, 81.312, -3.9770}; }
FieldVector fitted_field() { return {2.437, 1.703, 45.5553}; }

Eigen::Matrix3d rotation_matrix(double beta_deg, double alpha_deg) {
  if (!std::isfinite(beta_deg) || !std::isfinite(alpha_deg))
    throw std::invalid_argument("rotation_matrix: non-finite angle");
  const double b = beta_deg * constants::pi / 180.0;
  const double a = alpha_deg * constants::pi / 180.0;
  Eigen::Matrix3d r;
  r << std::cos(b) * std::cos(a), std::cos(b) * std::sin(a), -std::sin(b),
       -std::sin(a),              std::cos(a),               0.0,
       std::sin(b) * std::cos(a), std::sin(b) * std::sin(a), std::cos(b);
  return r;
}

Eigen::Matrix3d build_tensor(const Eigen::Vector3d& diag, JtAxis axis) {
  if (std::abs(diag(0) - diag(1)) >
      1e-12 * std::max({1.0, std::abs(diag(0)), std::abs(diag(1))}))
    throw std::invalid_argument(
        "build_tensor: diagonal is not axially symmetric (xx != yy)");
  const JtAngles ang = jt_angles(axis);
  const Eigen::Matrix3d r = rotation_matrix(ang.beta_deg, ang.alpha_deg);
  return r.transpose() * diag.asDiagonal() * r;
}

void require_hermitian(const Eigen::MatrixXcd& h, double tol) {
  const double scale = std::max(1.0, h.norm());
  if ((h - h.adjoint()).norm() > tol * scale)
    throw std::invalid_argument("matrix is not Hermitian within tolerance");
}

namespace basis {

std::string p1_token(int index) {
  static const char* nuc[] = {"+1", "0", "-1"};
  return std::string(electron_of(index) == 0 ? "u" : "d") + nuc[nitrogen_of(index)];
}

int parse_p1_token(const std::string& token) {
  if (token.size() < 2) throw SchemaError("bad P1 level token: " + token);
  int e;
  if (token[0] == 'u') e = 0;
  else if (token[0] == 'd') e = 1;
  else throw SchemaError("bad P1 level token (expects u/d prefix): " + token);
  const std::string rest = token.substr(1);
  int n;
  if (rest == "+1") n = 0;
  else if (rest == "0") n = 1;
  else if (rest == "-1") n = 2;
  else throw SchemaError("bad P1 level token (mI must be +1/0/-1): " + token);
  return p1(e, n);
}

std::string coupled_token(int index) {
  const int v = index / 6;
  return std::string(v == 0 ? "0:" : "-1:") + p1_token(index % 6);
}

}  // namespace basis

Matrix6cd p1_hamiltonian(const P1Params& params, const FieldVector& field,
                         JtAxis axis, const PhysicalConstants& pc) {
  const auto s = spin_half();
  const auto iv = spin_one();
  const Eigen::Matrix3d a_t = build_tensor(
      mhz_to_rad_us(1.0) *
          Eigen::Vector3d(params.a_perp_mhz, params.a_perp_mhz, params.a_par_mhz),
      axis);
  const Eigen::Matrix3d p_t = build_tensor(
      mhz_to_rad_us(params.p_par_mhz) * Eigen::Vector3d(-1.0 / 3, -1.0 / 3, 2.0 / 3),
      axis);

  Matrix6cd h = Matrix6cd::Zero();
  const Eigen::Matrix2cd id2 = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix3cd id3 = Eigen::Matrix3cd::Identity();
  for (int a = 0; a < 3; ++a) {
    h += pc.gamma_e * field(a) * Eigen::kroneckerProduct(s[a], id3);
    h += pc.gamma_n * field(a) * Eigen::kroneckerProduct(id2, iv[a]);
    for (int b = 0; b < 3; ++b) {
      h += a_t(a, b) * Eigen::kroneckerProduct(s[a], iv[b]);
      h += p_t(a, b) * Eigen::kroneckerProduct(id2, (iv[a] * iv[b]).eval());
    }
  }
  require_hermitian(h);
  return h;
}

Eigen::Matrix3cd nv_hamiltonian(const FieldVector& field,
                                const PhysicalConstants& pc) {
  const auto j = spin_one();
  Eigen::Matrix3cd h = pc.delta_nv * (j[2] * j[2]);
  for (int a = 0; a < 3; ++a) h += pc.gamma_e * field(a) * j[a];
  require_hermitian(h);
  return h;
}

Eigen::Matrix4cd dipolar_hamiltonian(const DefectGeometry& geom,
                                     const PhysicalConstants& pc) {
  if (!(geom.r_nm > 0.0))
    throw std::invalid_argument("dipolar_hamiltonian: r must be > 0");
  const double nd = pc.nu_dip_rad_us(geom.r_nm);
  const double st = std::sin(geom.theta_rad), ct = std::cos(geom.theta_rad);
  const double sp = std::sin(geom.phi_rad), cp = std::cos(geom.phi_rad);

  Eigen::Matrix3d c;  // coefficient of S_a J_b, symmetric
  c(0, 0) = 3 * st * st * cp * cp - 1;
  c(1, 1) = 3 * st * st * sp * sp - 1;
  c(2, 2) = 3 * ct * ct - 1;
  c(0, 1) = c(1, 0) = 3 * st * st * cp * sp;
  c(0, 2) = c(2, 0) = 3 * ct * st * cp;
  c(1, 2) = c(2, 1) = 3 * ct * st * sp;

  // NV spin-1 operators restricted to {ms=0, ms=-1} (rows/cols 1,2 of the
  // full matrices in the (+1, 0, -1) ordering).
  const auto j = spin_one();
  std::array<Eigen::Matrix2cd, 3> jr;
  for (int a = 0; a < 3; ++a) jr[a] = j[a].bottomRightCorner<2, 2>();
  const auto s = spin_half();

  Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      h += nd * c(a, b) * Eigen::kroneckerProduct(jr[b], s[a]);
  require_hermitian(h);
  return h;
}

Matrix12cd coupled_hamiltonian(const P1Params& params, const FieldVector& field,
                               JtAxis axis, const DefectGeometry& geom,
                               const PhysicalConstants& pc) {
  const Eigen::Matrix3cd hnv_full = nv_hamiltonian(field, pc);
  const Eigen::Matrix2cd hnv = hnv_full.bottomRightCorner<2, 2>();
  const Matrix6cd hp1 = p1_hamiltonian(params, field, axis, pc);
  const Eigen::Matrix4cd hdip = dipolar_hamiltonian(geom, pc);

  Matrix12cd h = Matrix12cd::Zero();
  h += Eigen::kroneckerProduct(hnv, Eigen::Matrix<std::complex<double>, 6, 6>::Identity());
  h += Eigen::kroneckerProduct(Eigen::Matrix2cd::Identity(), hp1);
  h += Eigen::kroneckerProduct(hdip, Eigen::Matrix3cd::Identity());
  require_hermitian(h);
  return h;
}

int EigenSystem::index_of_label(int basis_index) const {
  for (int j = 0; j < dim(); ++j)
    if (labels[j] == basis_index) return j;
  throw LabelingError("no eigenvector carries label " + std::to_string(basis_index));
}

double EigenSystem::level(int basis_index) const {
  return eigenvalues(index_of_label(basis_index));
}

double EigenSystem::transition_rad_us(int lower_basis, int upper_basis) const {
  return level(upper_basis) - level(lower_basis);
}

EigenSystem diagonalize(const Eigen::MatrixXcd& hamiltonian, double min_overlap) {
  require_hermitian(hamiltonian);
  const int n = static_cast<int>(hamiltonian.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hamiltonian);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("eigensolver failed");

  EigenSystem eig;
  eig.eigenvalues = solver.eigenvalues();
  eig.eigenvectors = solver.eigenvectors();

  const double scale = std::max(1.0, hamiltonian.norm());
  const double resid =
      (hamiltonian * eig.eigenvectors -
       eig.eigenvectors * eig.eigenvalues.asDiagonal().toDenseMatrix().cast<std::complex<double>>())
          .norm();
  if (resid > 1e-10 * scale)
    throw ConvergenceError("eigendecomposition residual above tolerance");

  // Greedy maximal-overlap label assignment: repeatedly take the best
  // remaining (basis, eigenvector) pair; ties go to the lower eigenvalue.
  struct Cand {
    double overlap;
    int basis, vec;
  };
  std::vector<Cand> cands;
  cands.reserve(n * n);
  for (int b = 0; b < n; ++b)
    for (int j = 0; j < n; ++j)
      cands.push_back({std::norm(eig.eigenvectors(b, j)), b, j});
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    if (x.overlap != y.overlap) return x.overlap > y.overlap;
    if (x.vec != y.vec) return x.vec < y.vec;
    return x.basis < y.basis;
  });

  eig.labels.assign(n, -1);
  std::vector<char> basis_used(n, 0);
  double worst = 1.0;
  int assigned = 0;
  for (const Cand& c : cands) {
    if (assigned == n) break;
    if (basis_used[c.basis] || eig.labels[c.vec] >= 0) continue;
    eig.labels[c.vec] = c.basis;
    basis_used[c.basis] = 1;
    worst = std::min(worst, c.overlap);
    ++assigned;
  }
  if (worst < min_overlap)
    throw LabelingError("ambiguous eigenvector labelling: worst overlap " +
                        std::to_string(worst) + " < " + std::to_string(min_overlap));
  return eig;
}

double effective_coupling(const EigenSystem& eig, int mi_index) {
  if (eig.dim() != 12)
    throw std::invalid_argument("effective_coupling needs a 12-dim eigensystem");
  if (mi_index < 0 || mi_index > 2)
    throw std::invalid_argument("mi_index must be 0 (+1), 1 (0) or 2 (-1)");
  const double l_m1_dn = eig.level(basis::coupled(1, 1, mi_index));
  const double l_0_dn = eig.level(basis::coupled(0, 1, mi_index));
  const double l_m1_up = eig.level(basis::coupled(1, 0, mi_index));
  const double l_0_up = eig.level(basis::coupled(0, 0, mi_index));
  return (l_m1_dn - l_0_dn) - (l_m1_up - l_0_up);
}

}  // namespace nvp1
