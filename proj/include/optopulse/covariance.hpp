#pragma once
// First- and second-moment dynamics of the linearized cavity-mechanics pair:
//   d gamma/dt = M gamma + gamma M^T + N,   d<R>/dt = M <R> + sigma c,
// with M = sigma V + (bath drift).
//
// Bath models:
//   paper     M = sigma V - (kappa/2) P, N = (kappa/2) P, P = diag(0,1,0,1).
//             The p-only damping is kept verbatim. It is not a completely
//             positive channel: vacuum decays toward gamma = I/2 on the damped
//             quadratures, so long runs with kappa > 0 can cross the
//             uncertainty bound. That is the model, not an integrator bug;
//             the physicality monitor is therefore off by default here.
//   extended  isotropic damping consistent with the dissipators 2 kappa D[a]
//             and gamma_m (nbar+1) D[b] + gamma_m nbar D[b^dag]:
//             drift diag(-kappa, -kappa, -gamma_m/2, -gamma_m/2),
//             N = diag(2 kappa, 2 kappa, gamma_m (2 nbar + 1) I_2).
//             The monitor is enforced on this model.

#include <vector>

#include "optopulse/drive.hpp"
#include "optopulse/gaussian.hpp"
#include "optopulse/symplectic.hpp"

namespace optopulse {

enum class BathModel { paper, extended };
enum class PhysicalityCheck { automatic, on, off };

Eigen::Matrix4d drift_matrix(const QuadraticHamiltonian& h, const SystemParams& p,
                             BathModel bath);
Eigen::Matrix4d noise_matrix(const SystemParams& p, BathModel bath);

struct TrajectoryPoint {
  double t = 0.0;
  GaussianState state;
  double n_phonon = 0.0;
  complexd g;  // coupling in effect at t
};

struct CovarianceTrajectory {
  std::vector<TrajectoryPoint> points;
  double final_phonon() const;
  double min_phonon() const;
};

struct PropagateOptions {
  BathModel bath = BathModel::paper;
  PhysicalityCheck check = PhysicalityCheck::automatic;
  double sample_dt = 0.0;  // 0: sample every step / every segment boundary
};

// Classical RK4 over a coupling history (the history is evaluated in closed
// form at stage times, so the error is O(dt^4) in the step alone). Throws
// NumericsError when the physicality monitor is active and min eig(gamma +
// i sigma) < -1e-9 at a sample point.
CovarianceTrajectory propagate(const GaussianState& s0, const SystemParams& p,
                               const CouplingHistory& hist, double t_final,
                               double dt, const PropagateOptions& opt = {});

// Exact propagation across piecewise-constant couplings: per segment the mean
// uses the augmented-matrix exponential and the second-moment noise integral
// the doubled-matrix exponential, so strong short pulses cost one exponential
// each instead of many stiff steps. samples_per_segment > 0 additionally
// records interior points.
GaussianState propagate_segments(const GaussianState& s0, const SystemParams& p,
                                 const std::vector<CouplingSegment>& segments,
                                 const PropagateOptions& opt = {},
                                 CovarianceTrajectory* sampled = nullptr,
                                 int samples_per_segment = 0);

}  // namespace optopulse
