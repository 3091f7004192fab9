#include "optopulse/params.hpp"

#include <cmath>

namespace optopulse {

namespace {
bool finite(double x) { return std::isfinite(x); }
}  // namespace

void SystemParams::validate() const {
  if (!finite(kappa) || !finite(g0) || !finite(delta) || !finite(gamma_m) ||
      !finite(nbar_env) || !finite(nu_si))
    throw ConfigError("SystemParams: non-finite entry");
  if (kappa < 0) throw ConfigError("SystemParams: kappa must be >= 0");
  if (g0 < 0) throw ConfigError("SystemParams: g0 must be >= 0");
  if (gamma_m < 0) throw ConfigError("SystemParams: gamma_m must be >= 0");
  if (nbar_env < 0) throw ConfigError("SystemParams: nbar_env must be >= 0");
  if (nu_si < 0) throw ConfigError("SystemParams: nu_si must be >= 0");
}

void FeasibilityInput::validate() const {
  if (!finite(nu_si) || !finite(m_eff_kg) || !finite(length_m) || !finite(lambda_m) ||
      !finite(kappa_si) || !finite(q_mech) || !finite(temperature_k))
    throw ConfigError("FeasibilityInput: non-finite entry");
  if (nu_si <= 0) throw ConfigError("FeasibilityInput: nu_si must be > 0");
  if (m_eff_kg <= 0) throw ConfigError("FeasibilityInput: m_eff_kg must be > 0");
  if (length_m <= 0) throw ConfigError("FeasibilityInput: length_m must be > 0");
  if (lambda_m <= 0) throw ConfigError("FeasibilityInput: lambda_m must be > 0");
  // optional fields use 0 as "unspecified"
  if (kappa_si < 0) throw ConfigError("FeasibilityInput: kappa_si must be >= 0");
  if (q_mech < 0) throw ConfigError("FeasibilityInput: q_mech must be >= 0");
  if (temperature_k < 0) throw ConfigError("FeasibilityInput: temperature_k must be >= 0");
}

}  // namespace optopulse
