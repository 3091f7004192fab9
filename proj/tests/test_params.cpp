#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "optopulse/params.hpp"

using namespace optopulse;

TEST_CASE("default params validate") {
  SystemParams p;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("negative rates rejected") {
  SystemParams p;
  p.kappa = -0.1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = SystemParams{};
  p.g0 = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = SystemParams{};
  p.gamma_m = -1e-9;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = SystemParams{};
  p.nbar_env = -2.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("non-finite entries rejected") {
  SystemParams p;
  p.delta = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("regime classifier threshold") {
  SystemParams p;
  p.g0 = 0.009;
  CHECK(p.linear_regime());
  p.g0 = 0.3;
  CHECK_FALSE(p.linear_regime());
  CHECK(p.linear_regime(0.5));
}

TEST_CASE("feasibility input validation") {
  FeasibilityInput in;
  CHECK_THROWS_AS(in.validate(), ConfigError);  // required fields unset
  in.nu_si = 2 * 3.141592653589793 * 1e6;
  in.m_eff_kg = 5e-11;
  in.length_m = 1e-2;
  in.lambda_m = 1064e-9;
  CHECK_NOTHROW(in.validate());
  in.kappa_si = -1.0;
  CHECK_THROWS_AS(in.validate(), ConfigError);
}
