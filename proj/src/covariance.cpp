#include "optopulse/covariance.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace optopulse {

using Eigen::Matrix4d;
using Eigen::Vector4d;

namespace {

Matrix4d bath_drift(const SystemParams& p, BathModel bath) {
  Matrix4d a = Matrix4d::Zero();
  if (bath == BathModel::paper) {
    a(ip_c, ip_c) = -p.kappa / 2.0;
    a(ip_m, ip_m) = -p.kappa / 2.0;
  } else {
    a(ix_c, ix_c) = a(ip_c, ip_c) = -p.kappa;
    a(ix_m, ix_m) = a(ip_m, ip_m) = -p.gamma_m / 2.0;
  }
  return a;
}

bool check_active(const SystemParams& p, BathModel bath, PhysicalityCheck check) {
  switch (check) {
    case PhysicalityCheck::on:
      return true;
    case PhysicalityCheck::off:
      return false;
    case PhysicalityCheck::automatic:
      // the verbatim p-quadrature damping is not completely positive, so the
      // bound genuinely fails there; enforce only where it must hold
      return bath == BathModel::extended || p.kappa == 0.0;
  }
  return true;
}

void enforce_physical(const GaussianState& s, double t) {
  double defect = uncertainty_defect(s);
  if (defect < -1e-9)
    throw NumericsError("covariance propagation left the physical cone at t = " +
                        std::to_string(t) + " (min eig(gamma + i sigma) = " +
                        std::to_string(defect) + "); reduce dt or check the model");
}

struct Moments {
  Matrix4d gamma;
  Vector4d mean;
};

Moments derivative(const Moments& y, const Matrix4d& m, const Matrix4d& n,
                   const Vector4d& sc) {
  Moments d;
  d.gamma = m * y.gamma + y.gamma * m.transpose() + n;
  d.mean = m * y.mean + sc;
  return d;
}

}  // namespace

Matrix4d drift_matrix(const QuadraticHamiltonian& h, const SystemParams& p,
                      BathModel bath) {
  return symplectic_form4() * h.V + bath_drift(p, bath);
}

Matrix4d noise_matrix(const SystemParams& p, BathModel bath) {
  Matrix4d n = Matrix4d::Zero();
  if (bath == BathModel::paper) {
    n(ip_c, ip_c) = p.kappa / 2.0;
    n(ip_m, ip_m) = p.kappa / 2.0;
  } else {
    n(ix_c, ix_c) = n(ip_c, ip_c) = 2.0 * p.kappa;
    double mech = p.gamma_m * (2.0 * p.nbar_env + 1.0);
    n(ix_m, ix_m) = n(ip_m, ip_m) = mech;
  }
  return n;
}

double CovarianceTrajectory::final_phonon() const {
  if (points.empty()) throw NumericsError("trajectory is empty");
  return points.back().n_phonon;
}

double CovarianceTrajectory::min_phonon() const {
  if (points.empty()) throw NumericsError("trajectory is empty");
  double m = points.front().n_phonon;
  for (const auto& pt : points) m = std::min(m, pt.n_phonon);
  return m;
}

CovarianceTrajectory propagate(const GaussianState& s0, const SystemParams& p,
                               const CouplingHistory& hist, double t_final,
                               double dt, const PropagateOptions& opt) {
  p.validate();
  if (!(dt > 0)) throw ConfigError("propagate: dt must be > 0");
  if (!(t_final >= 0)) throw ConfigError("propagate: t_final must be >= 0");

  const Matrix4d sf = symplectic_form4();
  const Matrix4d bd = bath_drift(p, opt.bath);
  const Matrix4d nz = noise_matrix(p, opt.bath);
  const bool monitor = check_active(p, opt.bath, opt.check);
  const double sample_dt = (opt.sample_dt > 0) ? opt.sample_dt : dt;

  auto rhs = [&](double t, const Moments& y) {
    QuadraticHamiltonian h = build_linear_hamiltonian(p, hist.at(t));
    Matrix4d m = sf * h.V + bd;
    return derivative(y, m, nz, sf * h.c);
  };

  CovarianceTrajectory traj;
  Moments y{s0.gamma, s0.mean};
  double t = 0.0;
  double next_sample = 0.0;

  auto record = [&](double tt, const Moments& m, bool force) {
    if (!force && tt + 1e-12 < next_sample) return;
    TrajectoryPoint pt;
    pt.t = tt;
    pt.state.gamma = m.gamma;
    pt.state.mean = m.mean;
    pt.n_phonon = phonon_number(pt.state);
    pt.g = hist.at(tt);
    if (monitor) enforce_physical(pt.state, tt);
    traj.points.push_back(pt);
    while (next_sample <= tt + 1e-12) next_sample += sample_dt;
  };

  record(0.0, y, true);
  while (t < t_final - 1e-12) {
    double h = std::min(dt, t_final - t);
    Moments k1 = rhs(t, y);
    Moments y2{y.gamma + 0.5 * h * k1.gamma, y.mean + 0.5 * h * k1.mean};
    Moments k2 = rhs(t + 0.5 * h, y2);
    Moments y3{y.gamma + 0.5 * h * k2.gamma, y.mean + 0.5 * h * k2.mean};
    Moments k3 = rhs(t + 0.5 * h, y3);
    Moments y4{y.gamma + h * k3.gamma, y.mean + h * k3.mean};
    Moments k4 = rhs(t + h, y4);
    y.gamma += h / 6.0 * (k1.gamma + 2 * k2.gamma + 2 * k3.gamma + k4.gamma);
    y.mean += h / 6.0 * (k1.mean + 2 * k2.mean + 2 * k3.mean + k4.mean);
    if (!y.gamma.allFinite() || !y.mean.allFinite())
      throw NumericsError("propagate: moments diverged at t = " + std::to_string(t) +
                          "; reduce dt");
    t += h;
    record(t, y, t >= t_final - 1e-12);
  }
  return traj;
}

GaussianState propagate_segments(const GaussianState& s0, const SystemParams& p,
                                 const std::vector<CouplingSegment>& segments,
                                 const PropagateOptions& opt,
                                 CovarianceTrajectory* sampled,
                                 int samples_per_segment) {
  p.validate();
  const Matrix4d sf = symplectic_form4();
  const Matrix4d bd = bath_drift(p, opt.bath);
  const Matrix4d nz = noise_matrix(p, opt.bath);
  const bool dissipative = bd.cwiseAbs().maxCoeff() > 0 || nz.cwiseAbs().maxCoeff() > 0;
  // closed-form symplectic steps preserve physicality exactly, so the
  // automatic monitor only engages where dissipation enters
  const bool monitor =
      opt.check == PhysicalityCheck::on ||
      (opt.check == PhysicalityCheck::automatic && dissipative &&
       opt.bath == BathModel::extended);

  GaussianState s = s0;
  double t = 0.0;

  auto record = [&](double tt, complexd g) {
    if (sampled == nullptr) return;
    TrajectoryPoint pt;
    pt.t = tt;
    pt.state = s;
    pt.n_phonon = phonon_number(s);
    pt.g = g;
    sampled->points.push_back(pt);
  };
  auto advance = [&](const CouplingSegment& seg, double dur) {
    QuadraticHamiltonian h = build_linear_hamiltonian(p, seg.g);
    Matrix4d m = sf * h.V + bd;
    Vector4d u = sf * h.c;
    if (!dissipative) {
      // closed flow: one augmented exponential provides S and d
      Eigen::Matrix<double, 5, 5> aug = Eigen::Matrix<double, 5, 5>::Zero();
      aug.topLeftCorner<4, 4>() = m;
      aug.topRightCorner<4, 1>() = u;
      Eigen::Matrix<double, 5, 5> e = (aug * dur).exp();
      Matrix4d smat = e.topLeftCorner<4, 4>();
      s.gamma = smat * s.gamma * smat.transpose();
      s.mean = smat * s.mean + e.topRightCorner<4, 1>();
    } else {
      // doubled-matrix exponential for the noise integral:
      // exp([[M, N], [0, -M^T]] t) = [[F, R], [0, G]], Phi = R F^T
      Eigen::Matrix<double, 8, 8> big = Eigen::Matrix<double, 8, 8>::Zero();
      big.topLeftCorner<4, 4>() = m;
      big.topRightCorner<4, 4>() = nz;
      big.bottomRightCorner<4, 4>() = -m.transpose();
      Eigen::Matrix<double, 8, 8> e = (big * dur).exp();
      Matrix4d f = e.topLeftCorner<4, 4>();
      Matrix4d phi = e.topRightCorner<4, 4>() * f.transpose();
      s.gamma = f * s.gamma * f.transpose() + phi;
      // mean with constant affine term
      Eigen::Matrix<double, 5, 5> aug = Eigen::Matrix<double, 5, 5>::Zero();
      aug.topLeftCorner<4, 4>() = m;
      aug.topRightCorner<4, 1>() = u;
      Eigen::Matrix<double, 5, 5> em = (aug * dur).exp();
      s.mean = em.topLeftCorner<4, 4>() * s.mean + em.topRightCorner<4, 1>();
    }
    t += dur;
  };

  record(0.0, segments.empty() ? complexd(0.0) : segments.front().g);
  for (const auto& seg : segments) {
    if (!(seg.duration >= 0) || !std::isfinite(seg.duration))
      throw ConfigError("propagate_segments: segment durations must be >= 0");
    if (seg.duration == 0.0) continue;
    if (samples_per_segment > 0) {
      double step = seg.duration / samples_per_segment;
      for (int k = 0; k < samples_per_segment; ++k) {
        advance(seg, step);
        record(t, seg.g);
        if (monitor) enforce_physical(s, t);
      }
    } else {
      advance(seg, seg.duration);
      record(t, seg.g);
      if (monitor) enforce_physical(s, t);
    }
  }
  return s;
}

}  // namespace optopulse
