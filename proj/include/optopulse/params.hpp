#pragma once
// Shared parameter types.
//
// Internal unit system: hbar = 1 and the mechanical frequency nu = 1. Every
// rate below is a multiple of nu and every time a multiple of 1/nu. SI values
// appear only in FeasibilityInput and in scenario *_si fields, which are
// converted on load using nu_si.

#include "optopulse/errors.hpp"

namespace optopulse {

struct SystemParams {
  double kappa = 0.0;     // cavity amplitude decay rate, d<a>/dt ~ -kappa <a>
  double g0 = 0.0;        // single-photon optomechanical coupling
  double delta = 0.0;     // laser-cavity detuning
  double gamma_m = 0.0;   // mechanical amplitude damping (extended bath only)
  double nbar_env = 0.0;  // mechanical bath occupation (extended bath only)
  double nu_si = 0.0;     // nu in rad/s when the scenario carried SI rates, else 0

  // Throws ConfigError on out-of-range entries.
  void validate() const;

  // Linearized-dynamics regime: g0 small against nu (= 1 internally).
  bool linear_regime(double threshold = 0.01) const { return g0 < threshold; }
};

// Geometry and mass inputs for coupling-strength estimates. SI units throughout.
struct FeasibilityInput {
  double nu_si = 0.0;          // mechanical angular frequency [rad/s]
  double m_eff_kg = 0.0;       // effective mass [kg]
  double length_m = 0.0;       // cavity length [m]
  double lambda_m = 0.0;       // laser wavelength [m]
  double kappa_si = 0.0;       // cavity decay [rad/s]; 0 means unspecified
  double q_mech = 0.0;         // mechanical quality factor; 0 means unspecified
  double temperature_k = 0.0;  // environment temperature [K]; 0 means unspecified

  void validate() const;
};

}  // namespace optopulse
