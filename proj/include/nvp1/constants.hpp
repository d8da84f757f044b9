#pragma once

#include <numbers>

// Unit conventions used throughout:
//   energies / angular frequencies  rad/us   (1 MHz ordinary = 2*pi rad/us)
//   magnetic fields                 gauss
//   lengths                         nm
//   times                           us
// All public interfaces that talk MHz or kHz say so in their names.

namespace nvp1 {

namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * pi;
}  // namespace constants

inline double mhz_to_rad_us(double f_mhz) { return constants::two_pi * f_mhz; }
inline double rad_us_to_mhz(double w) { return w / constants::two_pi; }

// Fixed physical constants of the NV / P1 system. Immutable by convention:
// every operation takes a const reference and never writes back.
struct PhysicalConstants {
  // Electron gyromagnetic ratio, rad/(us*G); 2.802495 MHz/G.
  double gamma_e = constants::two_pi * 2.802495;
  // 14N nuclear gyromagnetic ratio, rad/(us*G); -0.3078 kHz/G.
  double gamma_n = -constants::two_pi * 3.078e-4;
  // NV ground-state zero-field splitting, rad/us; 2.877 GHz.
  double delta_nv = constants::two_pi * 2877.0;
  // Diamond lattice constant, nm. Unit cell holds 8 carbon sites.
  double lattice_constant_nm = 0.3567;
  // Point-dipole prefactor mu0*gamma_e^2*hbar/(4*pi), expressed as an
  // ordinary frequency times volume: 52.0410 MHz*nm^3 (six digits).
  // nu_dip(r) = -2*pi * dipolar_prefactor_mhz_nm3 / r^3  [rad/us].
  double dipolar_prefactor_mhz_nm3 = 52.041011;

  double unit_cell_volume_nm3() const {
    return lattice_constant_nm * lattice_constant_nm * lattice_constant_nm;
  }
  // Signed dipolar coupling nu_dip at separation r, rad/us.
  double nu_dip_rad_us(double r_nm) const {
    return -constants::two_pi * dipolar_prefactor_mhz_nm3 / (r_nm * r_nm * r_nm);
  }
};

}  // namespace nvp1
