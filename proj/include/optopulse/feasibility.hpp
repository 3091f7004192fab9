#pragma once
// Order-of-magnitude arithmetic connecting the nu = 1 internal unit system to
// laboratory numbers: coupling strength from geometry, minimum pulse power,
// and log cooling rates.

#include "optopulse/params.hpp"

namespace optopulse {

inline constexpr double k_hbar_si = 1.054571817e-34;  // J s
inline constexpr double k_c_si = 299792458.0;         // m / s
inline constexpr double k_kb_si = 1.380649e-23;       // J / K

// Single-photon coupling from Fabry-Perot geometry [rad/s]:
//   g0 = (omega_cav / L) * sqrt(hbar / (2 m_eff nu)),  omega_cav = 2 pi c / lambda.
double derive_g0(const FeasibilityInput& in);

enum class CouplingRegime { linear, nonlinear };

// Minimum drive amplitude Omega (units of nu) for the pulsed protocols to beat
// free mechanical evolution. Linear sequences need Omega >= 10 nu^2/g0, the
// nested nonlinear sequence Omega >= 10^2 nu^2/g0.
double pulse_power_requirement(const SystemParams& params, CouplingRegime regime);

// Log cooling rate Gamma = ln(n0 / n_final) / t_total, in units of nu when
// t_total is in units of 1/nu.
double cooling_rate(double n0, double n_final, double t_total);

// Occupation ratio n0/n_final implied by a rate over a duration; inverse of
// cooling_rate.
double required_occupation_ratio(double gamma_nu, double t_total);

// Intracavity drive amplitude from input laser power [rad/s]:
//   Omega = sqrt(kappa P / (hbar omega_laser)),  omega_laser = 2 pi c / lambda.
double drive_amplitude_si(double power_w, double kappa_si, double lambda_m);

// Laser power for a target drive amplitude [W]; inverse of drive_amplitude_si.
double drive_power_si(double omega_si, double kappa_si, double lambda_m);

}  // namespace optopulse
