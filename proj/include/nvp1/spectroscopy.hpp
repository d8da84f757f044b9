#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nvp1/least_squares.hpp"
#include "nvp1/spin_system.hpp"

namespace nvp1 {

// One predicted P1 transition. Labels are product-basis indices of the
// labelled eigensystem of the axis; intensity is 4*|<f|Sx(x)1|i>|^2,
// normalized so an ideal allowed electron flip scores 1.
struct Transition {
  double freq_mhz = 0.0;
  JtAxis axis = JtAxis::D;
  int lower = 0;   // P1 basis label of the lower level
  int upper = 0;   // P1 basis label of the upper level
  double intensity = 0.0;
  bool main = false;  // member of the top-intensity electron-flip set
};

struct TransitionTable {
  std::vector<Transition> entries;  // sorted by frequency, 60 for a full P1
  double main_threshold = 0.0;
};

// All pairwise level differences across the four JT axes. With the default
// threshold the 12 electron-flip transitions are flagged as "main" at the
// fitted field (they sit above 0.58, the rest below 0.28).
TransitionTable transition_table(const P1Params& params, const FieldVector& field,
                                 double main_threshold = 0.4,
                                 const PhysicalConstants& pc = {});

std::string transition_label(const Transition& t);

// --- Measured spectra and dip extraction -------------------------------------

struct SpectrumData {
  std::vector<double> freq_mhz;  // strictly increasing
  std::vector<double> signal;    // NV ms=0 fidelity, in [0, 1]
  std::vector<double> sigma;     // optional per-point uncertainty (may be empty)
};

void validate(const SpectrumData& s);

struct DipWindow {
  double fmin_mhz = 0.0;
  double fmax_mhz = 0.0;
};

struct DipCenter {
  double center_mhz = 0.0;
  double stderr_mhz = 0.0;
  bool ok = false;
  std::string flag;  // set when the window was rejected (wrong curvature, ...)
};

// Per-window least-squares parabola; returns the vertex and its standard
// error. A window whose parabola does not open upward (no minimum) or whose
// vertex falls outside the window is flagged instead of returned as a
// center. Requires >= 5 points per window.
std::vector<DipCenter> extract_dip_centers(const SpectrumData& spectrum,
                                           const std::vector<DipWindow>& windows);

// --- Field estimation ---------------------------------------------------------

struct FieldGrid {
  double bx_min = -4.0, bx_max = 4.0;
  double by_min = -4.0, by_max = 4.0;
  double bz_min = 45.0, bz_max = 46.0;
  double step = 0.02;  // gauss
};

struct BruteForceResult {
  FieldVector field;
  double delta_mhz2 = 0.0;  // sum of squared frequency mismatches
  bool on_boundary = false;
};

// Grid search for the field that reproduces the four sorted highest-energy
// |+1,i> transitions. Delta = sum_i (f_exp,i - f_theo,i)^2 over the sorted
// quadruples. Deterministic: ties broken by lexicographic grid index, and
// the parallel reduction is ordered. Note the objective is exactly
// invariant under By -> -By (axes A and B swap); ties resolve toward the
// lexicographically first grid point.
BruteForceResult bruteforce_field_estimate(
    const std::array<double, 4>& sorted_freqs_mhz, const P1Params& init_params,
    const FieldGrid& grid = {}, int threads = 1, const PhysicalConstants& pc = {});

// --- Hamiltonian fitting -------------------------------------------------------

// A measured dip assigned to a specific transition. sigma_mhz <= 0 means
// "unweighted" (unit weight).
struct DipAssignment {
  double freq_mhz = 0.0;
  double sigma_mhz = 0.0;
  JtAxis axis = JtAxis::D;
  int lower = 0;
  int upper = 0;
};

struct FitResult {
  P1Params params;
  FieldVector field = FieldVector::Zero();
  Eigen::VectorXd residuals_mhz;          // measured - model, per dip
  std::array<double, 6> stderrs{};        // A_par, A_perp, P_par, Bx, By, Bz
  Eigen::MatrixXd covariance;             // 6x6, parameter units
  int iterations = 0;
  bool converged = false;
};

// Weighted least squares over {A_par, A_perp, P_par, Bx, By, Bz}. Needs at
// least 6 assigned dips. Weights are 1/sigma when sigmas are provided.
FitResult fit_hamiltonian(const std::vector<DipAssignment>& dips,
                          const P1Params& init_params, const FieldVector& init_field,
                          const PhysicalConstants& pc = {});

// Least-squares field estimate from the four |+1,i> main frequencies
// (indexed by axis A..D), hyperfine parameters held fixed.
FieldVector estimate_field_from_p1(const std::array<double, 4>& freqs_mhz_by_axis,
                                   const P1Params& params,
                                   const FieldVector& init_field,
                                   const PhysicalConstants& pc = {});

// The highest electron transition frequency per axis ( |+1,i> at these
// parameters), MHz, indexed by axis.
std::array<double, 4> plus1_frequencies(const P1Params& params,
                                        const FieldVector& field,
                                        const PhysicalConstants& pc = {});

// --- Effective gyromagnetic ratios --------------------------------------------

// Central-difference derivative of a labelled transition frequency with
// respect to one field component, rad/(us*G). component: 0=x, 1=y, 2=z.
double effective_gyromagnetic(const P1Params& params, const FieldVector& field,
                              JtAxis axis, int lower_label, int upper_label,
                              int component, double step_gauss = 0.01,
                              const PhysicalConstants& pc = {});

}  // namespace nvp1
