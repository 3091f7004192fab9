#include "optopulse/drive.hpp"

#include <algorithm>
#include <cmath>

namespace optopulse {

namespace {

// (1 - e^{-z d}) / z, series fallback near z d = 0
complexd decay_weight(complexd z, double d) {
  complexd zd = z * d;
  if (std::abs(zd) < 1e-6) {
    // d * (1 - zd/2 + zd^2/6 - zd^3/24)
    return d * (1.0 - zd / 2.0 + zd * zd / 6.0 - zd * zd * zd / 24.0);
  }
  return (1.0 - std::exp(-zd)) / z;
}

void check_schedule(const DriveSchedule& s) {
  for (const auto& seg : s) {
    if (!(seg.duration > 0) || !std::isfinite(seg.duration) ||
        !std::isfinite(seg.omega) || !std::isfinite(seg.phi))
      throw ConfigError("drive schedule: segments need finite omega/phi and duration > 0");
  }
}

}  // namespace

CouplingHistory::CouplingHistory(const SystemParams& p, const DriveSchedule& s) {
  p.validate();
  check_schedule(s);
  z_ = complexd(p.kappa, p.delta);
  g0_ = p.g0;
  complexd itilde = 0.0;
  double t = 0.0;
  for (const auto& seg : s) {
    Boundary b;
    b.t0 = t;
    b.itilde0 = itilde;
    b.w = seg.omega * std::exp(complexd(0.0, -seg.phi));
    boundaries_.push_back(b);
    itilde = std::exp(-z_ * seg.duration) * itilde + b.w * decay_weight(z_, seg.duration);
    t += seg.duration;
  }
  total_ = t;
}

complexd CouplingHistory::at(double t) const {
  if (boundaries_.empty()) return 0.0;
  t = std::clamp(t, 0.0, total_);
  // find the segment containing t
  size_t lo = 0, hi = boundaries_.size();
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    if (boundaries_[mid].t0 <= t)
      lo = mid;
    else
      hi = mid;
  }
  const Boundary& b = boundaries_[lo];
  double d = t - b.t0;
  complexd itilde = std::exp(-z_ * d) * b.itilde0 + b.w * decay_weight(z_, d);
  return complexd(0.0, g0_) * itilde;
}

std::vector<double> CouplingHistory::sample_times(double dt) const {
  std::vector<double> ts;
  if (boundaries_.empty()) return ts;
  if (!(dt > 0)) throw ConfigError("CouplingHistory: dt must be > 0");
  for (double t = 0.0; t < total_ - 0.5 * dt; t += dt) ts.push_back(t);
  ts.push_back(total_);
  return ts;
}

std::vector<complexd> CouplingHistory::sample_values(double dt) const {
  std::vector<complexd> vs;
  for (double t : sample_times(dt)) vs.push_back(at(t));
  return vs;
}

CouplingHistory coupling_from_drive(const SystemParams& p, const DriveSchedule& s,
                                    double dt) {
  if (s.empty()) return CouplingHistory();
  check_schedule(s);
  double min_dur = s.front().duration;
  for (const auto& seg : s) min_dur = std::min(min_dur, seg.duration);
  if (!(dt > 0) || dt > min_dur / 10.0 * (1.0 + 1e-12))
    throw ConfigError("coupling_from_drive: dt must be > 0 and <= min segment duration / 10");
  return CouplingHistory(p, s);
}

FieldTrajectory cavity_field_ode(const SystemParams& p, const DriveSchedule& s,
                                 complexd a0, double dt) {
  p.validate();
  check_schedule(s);
  if (!(dt > 0)) throw ConfigError("cavity_field_ode: dt must be > 0");
  // da/dt = w a + drv with w = i delta - kappa, drv = i Omega e^{i phi};
  // each segment is solved exactly, sampled on the dt grid
  const complexd w(-p.kappa, p.delta);
  FieldTrajectory out;
  complexd a = a0;
  double t = 0.0;
  out.t.push_back(t);
  out.a.push_back(a);
  for (const auto& seg : s) {
    complexd drv = complexd(0.0, seg.omega) * std::exp(complexd(0.0, seg.phi));
    double remaining = seg.duration;
    while (remaining > 1e-15 * seg.duration) {
      double h = std::min(dt, remaining);
      complexd grow = std::exp(w * h);
      // a(t+h) = e^{wh} a + drv (e^{wh} - 1)/w
      a = grow * a + drv * decay_weight(-w, h);
      t += h;
      remaining -= h;
      out.t.push_back(t);
      out.a.push_back(a);
    }
  }
  return out;
}

complexd cavity_steady_state(const SystemParams& p, double omega, double phi) {
  complexd denom(p.kappa, -p.delta);
  if (std::abs(denom) == 0.0)
    throw ConfigError("cavity_steady_state: undefined for kappa = delta = 0");
  return complexd(0.0, omega) * std::exp(complexd(0.0, phi)) / denom;
}

LaserRealization invert_coupling(const SystemParams& p,
                                 const std::vector<CouplingSegment>& segments) {
  p.validate();
  if (p.g0 <= 0) throw ConfigError("invert_coupling: g0 must be > 0");
  LaserRealization out;
  const complexd z(p.kappa, p.delta);
  const complexd ig0(0.0, p.g0);
  complexd prev = 0.0;
  for (const auto& seg : segments) {
    if (!(seg.duration > 0))
      throw ConfigError("invert_coupling: segment durations must be > 0");
    // boundary jump of the accumulator
    out.impulse_areas.push_back((seg.g - prev) / ig0);
    // holding G constant needs W = z G / (i g0)
    complexd w = z * seg.g / ig0;
    DriveSegment d;
    d.omega = std::abs(w);
    d.phi = (d.omega > 0) ? -std::arg(w) : 0.0;
    d.duration = seg.duration;
    out.steady.push_back(d);
    prev = seg.g;
  }
  return out;
}

}  // namespace optopulse
