#pragma once
// Laser drive schedules and the intracavity coupling they generate.
//
// A drive segment is a constant complex drive Omega e^{i phi} held for a
// duration. The linearized coupling follows the driven cavity response
//   G(t) = i g0 e^{-(kappa + i delta) t} \int_0^t Omega(s) e^{-i phi(s)}
//            e^{(kappa + i delta) s} ds,
// evaluated per segment in closed form. The accumulator
//   Itilde(t) = e^{-z (t - t0)} Itilde(t0) + W (1 - e^{-z (t - t0)}) / z,
//   z = kappa + i delta,  W = Omega e^{-i phi},
// keeps only decaying exponentials, so long schedules stay well conditioned.
// Consistency: with a(0) = 0 and the cavity field equation below,
// G(t) = -g0 conj(a(t)).

#include <complex>
#include <vector>

#include "optopulse/params.hpp"
#include "optopulse/quadratic.hpp"

namespace optopulse {

struct DriveSegment {
  double omega = 0.0;  // drive amplitude (units of nu)
  double phi = 0.0;    // drive phase [rad]
  double duration = 0.0;
};
using DriveSchedule = std::vector<DriveSegment>;

class CouplingHistory {
 public:
  CouplingHistory() = default;
  CouplingHistory(const SystemParams& p, const DriveSchedule& s);

  // Closed-form G(t); t is clamped to [0, total_duration].
  complexd at(double t) const;
  double total_duration() const { return total_; }
  bool empty() const { return boundaries_.empty(); }

  // Uniform samples every dt, endpoints included.
  std::vector<double> sample_times(double dt) const;
  std::vector<complexd> sample_values(double dt) const;

 private:
  struct Boundary {
    double t0 = 0.0;
    complexd itilde0;  // accumulator value entering the segment
    complexd w;        // Omega e^{-i phi} of the segment
  };
  std::vector<Boundary> boundaries_;
  double total_ = 0.0;
  complexd z_;  // kappa + i delta
  double g0_ = 0.0;
};

// Builds the closed-form history; dt only defines the default sampling grid
// and must satisfy dt <= min segment duration / 10 (the evaluation itself is
// exact and dt independent).
CouplingHistory coupling_from_drive(const SystemParams& p, const DriveSchedule& s,
                                    double dt);

// Integrates da/dt = -kappa a + i delta a + i Omega(t) e^{i phi(t)} using the
// exact per-segment solution of the linear ODE, sampled every dt. Returns
// (times, values); the final entry is the schedule end time.
struct FieldTrajectory {
  std::vector<double> t;
  std::vector<complexd> a;
};
FieldTrajectory cavity_field_ode(const SystemParams& p, const DriveSchedule& s,
                                 complexd a0, double dt);

// Fixed-point of the field equation under constant drive:
// a_ss = i Omega e^{i phi} / (kappa - i delta).
complexd cavity_steady_state(const SystemParams& p, double omega, double phi = 0.0);

// Piecewise-constant coupling, the optimizer's and compiler's working
// representation.
struct CouplingSegment {
  complexd g;
  double duration = 0.0;
};

// Laser-space realization of a coupling-space schedule: per segment a constant
// drive holds G steady (W = z G / (i g0)), and instantaneous drive impulses at
// the boundaries jump the accumulator by (G_next - G_prev) / (i g0). For
// kappa = delta = 0 the steady part vanishes and the schedule is a pure
// impulse train.
struct LaserRealization {
  DriveSchedule steady;
  std::vector<complexd> impulse_areas;  // one entry per boundary, incl. t = 0
};
LaserRealization invert_coupling(const SystemParams& p,
                                 const std::vector<CouplingSegment>& segments);

}  // namespace optopulse
