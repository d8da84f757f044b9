#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "nvp1/constants.hpp"

namespace nvp1 {

using FieldVector = Eigen::Vector3d;  // (Bx, By, Bz) in gauss, NV frame
using Matrix6cd = Eigen::Matrix<std::complex<double>, 6, 6>;
using Matrix12cd = Eigen::Matrix<std::complex<double>, 12, 12>;

// The four Jahn-Teller distortion axes of the P1 center. Each fixes the
// principal axis of the hyperfine and quadrupole tensors.
enum class JtAxis { A, B, C, D };

inline constexpr std::array<JtAxis, 4> kAllJtAxes{JtAxis::A, JtAxis::B,
                                                  JtAxis::C, JtAxis::D};

struct JtAngles {
  double beta_deg;
  double alpha_deg;
};

// (beta, alpha) per axis: A (109.5, 240), B (109.5, 120), C (109.5, 0),
// D (0, 0). D is the axis along z (the NV axis).
JtAngles jt_angles(JtAxis axis);
char jt_letter(JtAxis axis);
JtAxis jt_from_letter(char c);

// P1 hyperfine and quadrupole parameters, MHz (ordinary frequency).
// The diagonal tensors in the principal frame are axially symmetric:
//   A_diag = diag[A_perp, A_perp, A_par]
//   P_diag = P_par * diag[-1/3, -1/3, 2/3]   (traceless axial form; only the
//                                             axial part is observable)
struct P1Params {
  double a_par_mhz = 0.0;
  double a_perp_mhz = 0.0;
  double p_par_mhz = 0.0;
};

// Fitted values from the DEER spectroscopy dataset shipped in data/.
P1Params fitted_p1_params();
FieldVector fitted_field();

// NV-P1 separation in spherical coordinates (NV frame).
struct DefectGeometry {
  double r_nm = 0.0;
  double theta_rad = 0.0;
  double phi_rad = 0.0;
};

// Reduced rotation matrix R(beta, alpha) valid for axially symmetric
// tensors; orthogonal with det +1.
Eigen::Matrix3d rotation_matrix(double beta_deg, double alpha_deg);

// R^T * diag * R for the axis angles. Rejects a non-axial diagonal (the
// reduced two-angle rotation is only valid for axial tensors).
Eigen::Matrix3d build_tensor(const Eigen::Vector3d& diag, JtAxis axis);

// --- Product-basis labelling -------------------------------------------------
//
// Single P1 (6-dim): index = 3*e + n with
//   e: 0 = electron up, 1 = down;  n: 0 = mI +1, 1 = mI 0, 2 = mI -1.
// Coupled NV-P1 (12-dim): index = 6*v + 3*e + n with
//   v: 0 = NV ms 0, 1 = NV ms -1.
namespace basis {

inline int p1(int e, int n) { return 3 * e + n; }
inline int coupled(int v, int e, int n) { return 6 * v + 3 * e + n; }
inline int electron_of(int p1_index) { return p1_index / 3; }
inline int nitrogen_of(int p1_index) { return p1_index % 3; }

// Token forms: "u+1", "d0", "d-1"; coupled adds the NV part: "0:u+1",
// "-1:d0".
std::string p1_token(int index);
int parse_p1_token(const std::string& token);
std::string coupled_token(int index);

}  // namespace basis

// --- Hamiltonians ------------------------------------------------------------

// Single neutral P1 on electron spin-1/2 (x) 14N spin-1:
//   H = gamma_e B.S + gamma_n B.I + I.P_i.I + S.A_i.I     [rad/us]
Matrix6cd p1_hamiltonian(const P1Params& params, const FieldVector& field,
                         JtAxis axis, const PhysicalConstants& pc = {});

// NV ground-state electron spin-1: Delta*Jz^2 + gamma_e B.J.
Eigen::Matrix3cd nv_hamiltonian(const FieldVector& field,
                                const PhysicalConstants& pc = {});

// Full (non-secular) point-dipole coupling between the NV electron spin
// (restricted to the {ms=0, ms=-1} subspace, slow index) and the P1
// electron spin (fast index). Traceless, Hermitian, 4x4. Throws on r <= 0.
Eigen::Matrix4cd dipolar_hamiltonian(const DefectGeometry& geom,
                                     const PhysicalConstants& pc = {});

// H_NV (2-dim subspace) + H_P1 (6-dim) + H_dipole on the 12-dim coupled
// space. The NV-P1 electron-nuclear dipolar term is negligible at
// gamma_e/gamma_n ~ 9000 and is omitted.
Matrix12cd coupled_hamiltonian(const P1Params& params, const FieldVector& field,
                               JtAxis axis, const DefectGeometry& geom,
                               const PhysicalConstants& pc = {});

// --- Eigensystem with physical labels ---------------------------------------

struct EigenSystem {
  Eigen::VectorXd eigenvalues;    // rad/us, ascending
  Eigen::MatrixXcd eigenvectors;  // columns, orthonormal
  std::vector<int> labels;        // labels[j] = product-basis index of column j

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  // Eigenvector column carrying a given product-basis label.
  int index_of_label(int basis_index) const;
  // Eigenvalue of the level labelled |basis_index>.
  double level(int basis_index) const;
  // Transition angular frequency between two labelled levels (upper-lower).
  double transition_rad_us(int lower_basis, int upper_basis) const;
};

// Diagonalize a Hermitian matrix and assign product-basis labels by greedy
// maximal |<basis|eigvec>|^2, ties broken toward the lower eigenvalue.
// Throws LabelingError if any assigned overlap ends up below min_overlap
// (the labelling would be a guess at that point, not an identification).
EigenSystem diagonalize(const Eigen::MatrixXcd& hamiltonian,
                        double min_overlap = 0.34);

// Hermiticity guard used by all constructors: relative deviation of H from
// its adjoint. Throws std::invalid_argument above tol.
void require_hermitian(const Eigen::MatrixXcd& h, double tol = 1e-12);

// Effective NV-P1 dipolar coupling for nitrogen state mI (0 = +1, 1 = 0,
// 2 = -1) from a labelled 12-dim eigensystem:
//   nu = lam(-1,dn,mI) - lam(0,dn,mI) - (lam(-1,up,mI) - lam(0,up,mI))
// Signed, rad/us.
double effective_coupling(const EigenSystem& eig, int mi_index);

}  // namespace nvp1
