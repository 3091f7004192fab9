#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "optopulse/feasibility.hpp"

using namespace optopulse;

namespace {
constexpr double kPi = 3.14159265358979323846;

FeasibilityInput case1() {
  FeasibilityInput in;
  in.nu_si = 2 * kPi * 1e6;
  in.m_eff_kg = 5e-11;
  in.length_m = 1e-2;
  in.lambda_m = 1064e-9;
  return in;
}
}  // namespace

// Reference values precomputed from the closed-form expression with CODATA
// constants (independent double-precision evaluation).
TEST_CASE("coupling estimate, megahertz resonator") {
  double g0 = derive_g0(case1());
  CHECK(g0 == doctest::Approx(7.2528231771859367e+01).epsilon(1e-12));
  // quoted experimental figure is 75 Hz; stay within 10 %
  CHECK(std::abs(g0 / 75.0 - 1.0) < 0.10);
}

TEST_CASE("coupling estimate, short cavity") {
  FeasibilityInput in;
  in.nu_si = 2 * kPi * 1e4;
  in.m_eff_kg = 1e-10;
  in.lambda_m = 1064e-9;
  in.length_m = 4 * in.lambda_m;
  double g0 = derive_g0(in);
  CHECK(g0 == doctest::Approx(1.2050095045430299e+06).epsilon(1e-12));
  // order of magnitude 10^6
  CHECK(std::log10(g0) > 5.5);
  CHECK(std::log10(g0) < 6.5);
}

TEST_CASE("coupling scaling laws") {
  FeasibilityInput in = case1();
  double base = derive_g0(in);
  in.m_eff_kg *= 4;
  CHECK(derive_g0(in) == doctest::Approx(base / 2).epsilon(1e-12));
  in = case1();
  in.lambda_m *= 2;
  in.length_m *= 2;
  CHECK(derive_g0(in) == doctest::Approx(base / 4).epsilon(1e-12));
  in = case1();
  in.nu_si *= 9;
  CHECK(derive_g0(in) == doctest::Approx(base / 3).epsilon(1e-12));
}

TEST_CASE("pulse power thresholds") {
  SystemParams p;
  p.g0 = 0.001;
  CHECK(pulse_power_requirement(p, CouplingRegime::linear) ==
        doctest::Approx(1e4).epsilon(1e-14));
  p.g0 = 1.0;
  CHECK(pulse_power_requirement(p, CouplingRegime::nonlinear) ==
        doctest::Approx(1e2).epsilon(1e-14));
  p.g0 = 10.0;
  CHECK(pulse_power_requirement(p, CouplingRegime::nonlinear) ==
        doctest::Approx(10.0).epsilon(1e-14));
  p.g0 = 0.0;
  CHECK_THROWS_AS(pulse_power_requirement(p, CouplingRegime::linear), ConfigError);
}

TEST_CASE("cooling rate definition") {
  CHECK(cooling_rate(10.0, 10.0, 1.0) == doctest::Approx(0.0));
  // 100 -> 2e-7 in 0.57 periods
  double g = cooling_rate(100.0, 2e-7, 0.57 * 2 * kPi);
  CHECK(g == doctest::Approx(5.5927936752299994e+00).epsilon(1e-12));
  CHECK(std::abs(g / 5.6 - 1.0) < 0.02);
  CHECK_THROWS_AS(cooling_rate(-1.0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(cooling_rate(1.0, 0.0, 1.0), ConfigError);
}

TEST_CASE("rate inversion") {
  double r = required_occupation_ratio(1.3, 0.75 * 2 * kPi);
  CHECK(r == doctest::Approx(4.5765044605762671e+02).epsilon(1e-12));
  CHECK(std::abs(r / 459.0 - 1.0) < 0.01);
  // inverse pair
  double g = cooling_rate(r, 1.0, 0.75 * 2 * kPi);
  CHECK(g == doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("drive amplitude from laser power") {
  double kappa = 1e7, lam = 1064e-9, power = 1e-3;
  double omega_l = 2 * kPi * k_c_si / lam;
  double expected = std::sqrt(kappa * power / (k_hbar_si * omega_l));
  CHECK(drive_amplitude_si(power, kappa, lam) ==
        doctest::Approx(expected).epsilon(1e-14));
  // power -> amplitude -> power round trip
  double p2 = drive_power_si(drive_amplitude_si(power, kappa, lam), kappa, lam);
  CHECK(p2 == doctest::Approx(power).epsilon(1e-12));
}
