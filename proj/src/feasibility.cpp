#include "optopulse/feasibility.hpp"

#include <cmath>

namespace optopulse {

namespace {
constexpr double k_two_pi = 6.283185307179586476925286766559;
}

double derive_g0(const FeasibilityInput& in) {
  in.validate();
  double omega_cav = k_two_pi * k_c_si / in.lambda_m;
  return omega_cav / in.length_m * std::sqrt(k_hbar_si / (2.0 * in.m_eff_kg * in.nu_si));
}

double pulse_power_requirement(const SystemParams& params, CouplingRegime regime) {
  if (params.g0 <= 0) throw ConfigError("pulse_power_requirement: g0 must be > 0");
  double scale = (regime == CouplingRegime::linear) ? 10.0 : 100.0;
  return scale / params.g0;  // nu = 1 internally
}

double cooling_rate(double n0, double n_final, double t_total) {
  if (n0 <= 0 || n_final <= 0)
    throw ConfigError("cooling_rate: occupations must be > 0");
  if (t_total <= 0) throw ConfigError("cooling_rate: duration must be > 0");
  return std::log(n0 / n_final) / t_total;
}

double required_occupation_ratio(double gamma_nu, double t_total) {
  if (t_total <= 0)
    throw ConfigError("required_occupation_ratio: duration must be > 0");
  return std::exp(gamma_nu * t_total);
}

double drive_amplitude_si(double power_w, double kappa_si, double lambda_m) {
  if (power_w < 0 || kappa_si <= 0 || lambda_m <= 0)
    throw ConfigError("drive_amplitude_si: need power >= 0, kappa > 0, lambda > 0");
  double omega_laser = k_two_pi * k_c_si / lambda_m;
  return std::sqrt(kappa_si * power_w / (k_hbar_si * omega_laser));
}

double drive_power_si(double omega_si, double kappa_si, double lambda_m) {
  if (omega_si < 0 || kappa_si <= 0 || lambda_m <= 0)
    throw ConfigError("drive_power_si: need omega >= 0, kappa > 0, lambda > 0");
  double omega_laser = k_two_pi * k_c_si / lambda_m;
  return omega_si * omega_si * k_hbar_si * omega_laser / kappa_si;
}

}  // namespace optopulse
