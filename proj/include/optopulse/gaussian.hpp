#pragma once
// Gaussian state of the cavity-mechanics pair: first moments plus the real
// symmetrized covariance gamma_ij = <{dR_i, dR_j}> = 2 Re<R_i R_j> - 2<R_i><R_j>.
// Vacuum gamma is the identity; a thermal mode has gamma = (2n + 1) I.

#include <Eigen/Dense>

#include "optopulse/quadratic.hpp"

namespace optopulse {

struct GaussianState {
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Matrix4d gamma = Eigen::Matrix4d::Identity();
};

GaussianState vacuum_state();
GaussianState thermal_state(double n_cavity, double n_mech);

// Mechanical occupation including coherent displacement energy:
//   n = (gamma_mm_trace - 2)/4 + (<x_m>^2 + <p_m>^2)/2.
double phonon_number(const GaussianState& s);
double cavity_occupation(const GaussianState& s);

// Physicality margin: min eigenvalue of gamma + i sigma. Nonnegative (up to
// roundoff) for states realizable in quantum mechanics.
double uncertainty_defect(const GaussianState& s);

}  // namespace optopulse
