#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "optopulse/covariance.hpp"

using namespace optopulse;

namespace {

Eigen::Vector4d mean0() { return {0.3, -0.2, 1.0, 0.5}; }

double max_abs_diff(const Eigen::Matrix4d& a, const Eigen::Matrix4d& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("gaussian state builders and occupations") {
  GaussianState vac = vacuum_state();
  CHECK(vac.mean.norm() == 0.0);
  CHECK(max_abs_diff(vac.gamma, Eigen::Matrix4d::Identity()) == 0.0);
  CHECK(phonon_number(vac) == doctest::Approx(0.0));
  CHECK(std::abs(uncertainty_defect(vac)) < 1e-12);

  GaussianState th = thermal_state(0.5, 2.0);
  CHECK(th.gamma(0, 0) == doctest::Approx(2.0));
  CHECK(th.gamma(3, 3) == doctest::Approx(5.0));
  CHECK(phonon_number(th) == doctest::Approx(2.0));
  CHECK(cavity_occupation(th) == doctest::Approx(0.5));
  CHECK(uncertainty_defect(th) == doctest::Approx(1.0).epsilon(1e-10));

  // displacement contributes |mean|^2 / 2 per mode
  GaussianState disp = vacuum_state();
  disp.mean << 0.0, 0.0, 1.2, -0.3;
  CHECK(phonon_number(disp) == doctest::Approx((1.2 * 1.2 + 0.3 * 0.3) / 2));

  GaussianState squeezed = vacuum_state();
  squeezed.gamma(1, 1) = 0.55;  // sub-vacuum p_c without matching x_c growth
  CHECK(uncertainty_defect(squeezed) < -0.2);
}

TEST_CASE("drift and noise matrices") {
  SystemParams p;
  p.kappa = 0.9;
  p.delta = 0.4;
  p.g0 = 0.3;
  p.gamma_m = 0.05;
  p.nbar_env = 3.0;
  QuadraticHamiltonian h = build_linear_hamiltonian(p, complexd(0.1, -0.2));

  Eigen::Matrix4d hz = symplectic_form4() * h.V;

  Eigen::Matrix4d mp = drift_matrix(h, p, BathModel::paper);
  Eigen::Matrix4d expect_p = hz;
  expect_p(1, 1) -= 0.45;
  expect_p(3, 3) -= 0.45;
  CHECK(max_abs_diff(mp, expect_p) < 1e-15);
  Eigen::Matrix4d np = noise_matrix(p, BathModel::paper);
  CHECK(max_abs_diff(np, 0.45 * Eigen::Vector4d(0, 1, 0, 1).asDiagonal().toDenseMatrix()) <
        1e-15);

  Eigen::Matrix4d me = drift_matrix(h, p, BathModel::extended);
  Eigen::Matrix4d expect_e = hz;
  expect_e(0, 0) -= 0.9;
  expect_e(1, 1) -= 0.9;
  expect_e(2, 2) -= 0.025;
  expect_e(3, 3) -= 0.025;
  CHECK(max_abs_diff(me, expect_e) < 1e-15);
  Eigen::Matrix4d ne = noise_matrix(p, BathModel::extended);
  Eigen::Vector4d diag_e(1.8, 1.8, 0.05 * 7.0, 0.05 * 7.0);
  CHECK(max_abs_diff(ne, diag_e.asDiagonal().toDenseMatrix()) < 1e-15);
}

TEST_CASE("free evolution conserves the phonon number") {
  SystemParams p;
  p.delta = 0.3;
  p.g0 = 0.7;
  GaussianState s0 = thermal_state(0.0, 5.0);
  s0.mean << 0.0, 0.0, 1.2, -0.3;
  double n0 = phonon_number(s0);

  double t_final = 2.0 * M_PI;
  CouplingHistory hist = coupling_from_drive(p, {{0.0, 0.0, t_final}}, 0.1);
  CovarianceTrajectory tr = propagate(s0, p, hist, t_final, t_final / 6000);
  REQUIRE(!tr.points.empty());
  for (const auto& pt : tr.points) CHECK(std::abs(pt.n_phonon - n0) < 1e-9);

  // one full mechanical period returns the mechanical moments
  const GaussianState& end = tr.points.back().state;
  CHECK(std::abs(end.mean(2) - 1.2) < 1e-8);
  CHECK(std::abs(end.mean(3) + 0.3) < 1e-8);
  CHECK(std::abs(end.gamma(2, 2) - 11.0) < 1e-8);
}

// Frozen endpoint for the p-damped bath, zero coupling:
// kappa = 1, delta = 0.7, gamma0 = diag(1,1,5,5), mean0 = (0.3,-0.2,1,0.5),
// t = 0.8. Reference computed with an independent dense integrator at
// tolerance 1e-12.
namespace {
Eigen::Matrix4d frozen_pdamped_gamma() {
  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  g(0, 0) = 9.7052945583453454e-01;
  g(0, 1) = g(1, 0) = -6.8473881152937691e-02;
  g(1, 1) = 7.4870050531034626e-01;
  g(2, 2) = 4.4918520651529210e+00;
  g(2, 3) = g(3, 2) = -7.8700830748422834e-01;
  g(3, 3) = 2.9345325029099500e+00;
  return g;
}
Eigen::Vector4d frozen_pdamped_mean() {
  return {1.7211864879317137e-01, -2.4193549085644811e-01, 1.0287169268248100e+00,
          -3.7277642344790479e-01};
}
constexpr double k_frozen_pdamped_n = 1.9552065307229642e+00;

SystemParams pdamped_params() {
  SystemParams p;
  p.kappa = 1.0;
  p.delta = 0.7;
  p.g0 = 0.5;
  return p;
}
GaussianState pdamped_start() {
  GaussianState s = thermal_state(0.0, 2.0);
  s.mean = mean0();
  return s;
}
}  // namespace

TEST_CASE("p-damped bath frozen endpoint, stepped integrator") {
  SystemParams p = pdamped_params();
  CouplingHistory hist = coupling_from_drive(p, {{0.0, 0.0, 0.8}}, 0.05);
  CovarianceTrajectory tr = propagate(pdamped_start(), p, hist, 0.8, 0.8 / 1600);
  const TrajectoryPoint& end = tr.points.back();
  CHECK(end.t == doctest::Approx(0.8));
  CHECK(max_abs_diff(end.state.gamma, frozen_pdamped_gamma()) < 1e-7);
  CHECK((end.state.mean - frozen_pdamped_mean()).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(std::abs(end.n_phonon - k_frozen_pdamped_n) < 1e-7);
  CHECK(std::abs(end.g) == 0.0);
}

TEST_CASE("p-damped bath frozen endpoint, segment propagator") {
  GaussianState end = propagate_segments(pdamped_start(), pdamped_params(),
                                         {{complexd(0.0, 0.0), 0.8}});
  CHECK(max_abs_diff(end.gamma, frozen_pdamped_gamma()) < 1e-10);
  CHECK((end.mean - frozen_pdamped_mean()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(phonon_number(end) - k_frozen_pdamped_n) < 1e-10);
}

// Frozen endpoint for the isotropic bath with a held coupling:
// kappa = 0.6, delta = -0.4, gamma_m = 0.1, nbar = 3, G = 0.2 + 0.5i,
// gamma0 = diag(1,1,7,7), mean0 = (0.3,-0.2,1,0.5), t = 1.1.
namespace {
Eigen::Matrix4d frozen_iso_gamma() {
  Eigen::Matrix4d g;
  g << 2.6958862410390179e+00, 1.0262001612022507e+00, -3.1372428400131178e+00,
      1.2579770499554437e+00, 1.0262001612022507e+00, 1.6405555373598728e+00,
      -1.6197940877890100e+00, 1.5825283262934910e+00, -3.1372428400131178e+00,
      -1.6197940877890100e+00, 7.0479828741679027e+00, 1.0691049131962292e-01,
      1.2579770499554437e+00, 1.5825283262934910e+00, 1.0691049131962292e-01,
      7.6818391979295262e+00;
  return g;
}
Eigen::Vector4d frozen_iso_mean() {
  return {-2.7892919082369672e-01, -3.4030757418598306e-01, 6.0224678515636021e-01,
          -1.0289144560012899e+00};
}
constexpr double k_frozen_iso_n = 3.8931385920241581e+00;

SystemParams iso_params() {
  SystemParams p;
  p.kappa = 0.6;
  p.delta = -0.4;
  p.g0 = 0.5;
  p.gamma_m = 0.1;
  p.nbar_env = 3.0;
  return p;
}
}  // namespace

TEST_CASE("isotropic bath frozen endpoint, segment propagator") {
  GaussianState s0 = thermal_state(0.0, 3.0);
  s0.mean = mean0();
  PropagateOptions opt;
  opt.bath = BathModel::extended;
  GaussianState end =
      propagate_segments(s0, iso_params(), {{complexd(0.2, 0.5), 1.1}}, opt);
  CHECK(max_abs_diff(end.gamma, frozen_iso_gamma()) < 1e-10);
  CHECK((end.mean - frozen_iso_mean()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(phonon_number(end) - k_frozen_iso_n) < 1e-10);
}

TEST_CASE("isotropic bath: stepped and segment paths agree") {
  SystemParams p = iso_params();
  GaussianState s0 = thermal_state(0.0, 3.0);
  s0.mean = mean0();
  PropagateOptions opt;
  opt.bath = BathModel::extended;

  CouplingHistory hist = coupling_from_drive(p, {{0.0, 0.0, 1.1}}, 0.05);
  CovarianceTrajectory tr = propagate(s0, p, hist, 1.1, 1.1 / 2200, opt);
  GaussianState seg = propagate_segments(s0, p, {{complexd(0.0, 0.0), 1.1}}, opt);

  const GaussianState& rk = tr.points.back().state;
  CHECK(max_abs_diff(rk.gamma, seg.gamma) < 1e-7);
  CHECK((rk.mean - seg.mean).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("stepped integrator matches midpoint-held segments on a drive") {
  SystemParams p;
  p.delta = 0.8;
  p.g0 = 0.7;
  DriveSchedule sched = {{2.0, 0.5, 1.3}, {0.8, -1.1, 0.9}};
  CouplingHistory hist = coupling_from_drive(p, sched, 0.01);

  GaussianState s0 = thermal_state(0.0, 1.0);
  s0.mean = mean0();
  double t_final = 2.2;
  CovarianceTrajectory tr = propagate(s0, p, hist, t_final, t_final / 22000);

  int n_slices = 2200;
  std::vector<CouplingSegment> slices(n_slices);
  for (int k = 0; k < n_slices; ++k) {
    double mid = (k + 0.5) * t_final / n_slices;
    slices[k] = {hist.at(mid), t_final / n_slices};
  }
  GaussianState seg = propagate_segments(s0, p, slices);

  const GaussianState& rk = tr.points.back().state;
  CHECK(max_abs_diff(rk.gamma, seg.gamma) < 1e-5);
  CHECK((rk.mean - seg.mean).cwiseAbs().maxCoeff() < 1e-5);

  // undamped flow keeps the state physical throughout
  for (const auto& pt : tr.points) CHECK(uncertainty_defect(pt.state) > -1e-9);
}

TEST_CASE("p-damped bath relaxes the cavity toward half vacuum") {
  // The p-only damping contracts both quadrature pairs toward gamma = I/2,
  // below the vacuum floor; the monitor stays quiet unless forced on.
  SystemParams p;
  p.kappa = 1.0;
  p.delta = 0.7;
  p.g0 = 0.5;
  GaussianState end = propagate_segments(vacuum_state(), p, {{complexd(0.0, 0.0), 50.0}});
  Eigen::Matrix2d cav = end.gamma.topLeftCorner<2, 2>();
  CHECK((cav - 0.5 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(uncertainty_defect(end) < -0.2);

  PropagateOptions strict;
  strict.check = PhysicalityCheck::on;
  CHECK_THROWS_AS(
      propagate_segments(vacuum_state(), p, {{complexd(0.0, 0.0), 50.0}}, strict),
      NumericsError);

  // stepped path: same contrast between default and forced monitoring
  CouplingHistory hist = coupling_from_drive(p, {{0.0, 0.0, 3.0}}, 0.05);
  CHECK_NOTHROW(propagate(vacuum_state(), p, hist, 3.0, 1e-3));
  CHECK_THROWS_AS(propagate(vacuum_state(), p, hist, 3.0, 1e-3, strict), NumericsError);
}

TEST_CASE("segment propagator sampling and degenerate segments") {
  SystemParams p;
  p.delta = 1.0;
  p.g0 = 0.5;
  std::vector<CouplingSegment> segs = {{complexd(0.3, 0.1), 0.4},
                                       {complexd(-0.2, 0.4), 0.3}};

  CovarianceTrajectory sampled;
  GaussianState end = propagate_segments(thermal_state(0.0, 2.0), p, segs, {}, &sampled, 5);
  REQUIRE(sampled.points.size() >= 3);
  for (size_t i = 1; i < sampled.points.size(); ++i)
    CHECK(sampled.points[i].t >= sampled.points[i - 1].t);
  CHECK(sampled.points.back().t == doctest::Approx(0.7));
  CHECK(max_abs_diff(sampled.points.back().state.gamma, end.gamma) < 1e-10);
  CHECK(sampled.min_phonon() <= sampled.final_phonon());

  std::vector<CouplingSegment> with_null = {segs[0], {complexd(9.0, 9.0), 0.0}, segs[1]};
  GaussianState end2 = propagate_segments(thermal_state(0.0, 2.0), p, with_null);
  CHECK(max_abs_diff(end.gamma, end2.gamma) < 1e-14);
  CHECK((end.mean - end2.mean).cwiseAbs().maxCoeff() < 1e-14);
}
