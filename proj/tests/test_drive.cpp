#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "optopulse/drive.hpp"

using namespace optopulse;

namespace {

SystemParams params_kd() {
  SystemParams p;
  p.kappa = 0.3;
  p.delta = 0.8;
  p.g0 = 0.7;
  return p;
}

DriveSchedule two_segments() {
  return {{2.0, 0.5, 1.3}, {0.8, -1.1, 0.9}};
}

}  // namespace

TEST_CASE("empty drive gives empty history") {
  CouplingHistory h = coupling_from_drive(params_kd(), {}, 0.01);
  CHECK(h.empty());
  CHECK(h.total_duration() == 0.0);
}

TEST_CASE("zero drive gives zero coupling") {
  CouplingHistory h = coupling_from_drive(params_kd(), {{0.0, 0.0, 2.0}}, 0.1);
  CHECK(std::abs(h.at(0.7)) == 0.0);
  CHECK(std::abs(h.at(2.0)) == 0.0);
}

TEST_CASE("dt precondition") {
  CHECK_THROWS_AS(coupling_from_drive(params_kd(), two_segments(), 0.2), ConfigError);
  CHECK_THROWS_AS(coupling_from_drive(params_kd(), two_segments(), -0.1), ConfigError);
  CHECK_NOTHROW(coupling_from_drive(params_kd(), two_segments(), 0.05));
}

// Reference values precomputed by adaptive quadrature of the defining
// response integral (tolerance 1e-13), independent of the closed form here.
TEST_CASE("coupling matches the response integral") {
  CouplingHistory h = coupling_from_drive(params_kd(), two_segments(), 0.01);
  struct Ref { double t, re, im; };
  const Ref refs[] = {
      {0.7, 6.0744815091887272e-01, 6.2625418306771885e-01},
      {1.3, 1.2009217363845022e+00, 7.9563866957420648e-01},
      {1.9, 9.6438995691172646e-01, 3.2329699644493592e-01},
      {2.2, 7.9308809046035333e-01, 1.6653238233135784e-01},
  };
  for (const auto& r : refs) {
    complexd g = h.at(r.t);
    CHECK(g.real() == doctest::Approx(r.re).epsilon(1e-11));
    CHECK(g.imag() == doctest::Approx(r.im).epsilon(1e-11));
  }
}

TEST_CASE("sampling grid is exact, not quadrature") {
  CouplingHistory h = coupling_from_drive(params_kd(), two_segments(), 0.05);
  auto coarse_t = h.sample_times(0.05);
  auto coarse = h.sample_values(0.05);
  // refining dt must not move shared sample points
  for (size_t i = 0; i < coarse_t.size(); ++i) {
    complexd fine = h.at(coarse_t[i]);
    CHECK(std::abs(fine - coarse[i]) < 1e-14);
  }
  CHECK(coarse_t.front() == 0.0);
  CHECK(coarse_t.back() == doctest::Approx(2.2));
}

TEST_CASE("steady-state limit of the coupling") {
  SystemParams p = params_kd();
  CouplingHistory h = coupling_from_drive(p, {{1.5, 0.0, 80.0}}, 1.0);
  // G -> g0 Omega / (delta - i kappa)
  complexd expect = p.g0 * 1.5 / complexd(p.delta, -p.kappa);
  CHECK(std::abs(h.at(80.0) - expect) < 1e-9);
}

TEST_CASE("undamped resonant drive grows linearly") {
  SystemParams p;
  p.g0 = 0.7;
  CouplingHistory h = coupling_from_drive(p, {{2.0, 0.0, 5.0}}, 0.1);
  for (double t : {1.0, 2.5, 5.0}) {
    complexd expect(0.0, 0.7 * 2.0 * t);
    CHECK(std::abs(h.at(t) - expect) < 1e-12 * (1.0 + std::abs(expect)));
  }
}

TEST_CASE("field decay without drive") {
  SystemParams p;
  p.kappa = 0.4;
  FieldTrajectory tr = cavity_field_ode(p, {{0.0, 0.0, 3.0}}, complexd(1.0, -0.5), 0.01);
  complexd expect = complexd(1.0, -0.5) * std::exp(-0.4 * 3.0);
  CHECK(std::abs(tr.a.back() - expect) < 1e-13);
}

// Frozen endpoint from the per-segment closed form, cross-checked against a
// high-accuracy adaptive integrator (agreement 3e-11).
TEST_CASE("field trajectory endpoint") {
  FieldTrajectory tr = cavity_field_ode(params_kd(), two_segments(), complexd(0.4, -0.2), 0.01);
  CHECK(tr.a.back().real() == doctest::Approx(-1.0703405385415663e+00).epsilon(1e-12));
  CHECK(tr.a.back().imag() == doctest::Approx(4.6039606416001011e-01).epsilon(1e-12));
  CHECK(tr.t.back() == doctest::Approx(2.2));
  CHECK(tr.t.size() == tr.a.size());
}

TEST_CASE("field stays bounded under bounded drive") {
  SystemParams p;
  p.kappa = 0.5;
  p.delta = 1.2;
  DriveSchedule s = {{3.0, 0.3, 4.0}, {1.0, -0.8, 4.0}, {2.0, 2.0, 4.0}};
  FieldTrajectory tr = cavity_field_ode(p, s, complexd(0.7, 0.1), 0.02);
  double bound = std::abs(complexd(0.7, 0.1)) +
                 3.0 / p.kappa * std::sqrt(1.0 + p.delta * p.delta / (p.kappa * p.kappa));
  for (const auto& a : tr.a) CHECK(std::abs(a) <= bound);
}

TEST_CASE("steady state fixed point") {
  SystemParams p;
  p.kappa = 0.75;
  p.delta = 1.0;
  complexd ss = cavity_steady_state(p, 2.0, 0.0);
  complexd expect = complexd(0.0, 2.0) / complexd(0.75, -1.0);
  CHECK(std::abs(ss - expect) < 1e-15);
  // da/dt vanishes there
  complexd w(-p.kappa, p.delta);
  complexd drv(0.0, 2.0);
  CHECK(std::abs(w * ss + drv) < 1e-15);
}

TEST_CASE("coupling equals minus conjugate cavity response") {
  // with a(0) = 0: G(t) = -g0 conj(a(t))
  SystemParams p = params_kd();
  DriveSchedule s = two_segments();
  CouplingHistory h = coupling_from_drive(p, s, 0.01);
  FieldTrajectory tr = cavity_field_ode(p, s, complexd(0.0, 0.0), 0.01);
  for (size_t i = 0; i < tr.t.size(); i += 7) {
    complexd g = h.at(tr.t[i]);
    complexd expect = -p.g0 * std::conj(tr.a[i]);
    CHECK(std::abs(g - expect) < 1e-10);
  }
}

TEST_CASE("coupling inversion round trip") {
  SystemParams p = params_kd();
  std::vector<CouplingSegment> segs = {{complexd(0.2, 0.4), 0.8},
                                       {complexd(-0.1, 0.3), 1.1}};
  LaserRealization lr = invert_coupling(p, segs);
  REQUIRE(lr.steady.size() == 2);
  REQUIRE(lr.impulse_areas.size() == 2);
  // steady drive alone reproduces each plateau: W = z G / (i g0) means the
  // accumulator fixed point is exactly G_k / (i g0)
  complexd z(p.kappa, p.delta);
  for (size_t k = 0; k < segs.size(); ++k) {
    complexd w = lr.steady[k].omega * std::exp(complexd(0.0, -lr.steady[k].phi));
    complexd g_held = complexd(0.0, p.g0) * w / z;
    CHECK(std::abs(g_held - segs[k].g) < 1e-12);
  }
  // resonant undamped case: steady part vanishes, impulses carry everything
  SystemParams p0;
  p0.g0 = 0.5;
  LaserRealization lr0 = invert_coupling(p0, segs);
  CHECK(lr0.steady[0].omega == doctest::Approx(0.0));
  CHECK(std::abs(lr0.impulse_areas[0] - segs[0].g / complexd(0.0, 0.5)) < 1e-14);
}
