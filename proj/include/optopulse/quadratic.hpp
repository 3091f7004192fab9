#pragma once
// Quadratic Hamiltonians over the quadrature vector R = (x_c, p_c, x_m, p_m).
//
// Conventions used throughout the library:
//   x = (a + a^dag)/sqrt(2),  p = i(a^dag - a)/sqrt(2),  [x, p] = i,
//   a^dag a = (x^2 + p^2 - 1)/2, vacuum covariance = identity,
//   H = 1/2 R^T V R + c^T R with V symmetric.
// Under these, dR/dt = sigma (V R + c) with sigma the symplectic form.

#include <complex>

#include <Eigen/Dense>

#include "optopulse/params.hpp"

namespace optopulse {

using complexd = std::complex<double>;

enum QuadIndex { ix_c = 0, ip_c = 1, ix_m = 2, ip_m = 3 };

// Block-diagonal symplectic form for n modes, J = [[0, 1], [-1, 0]] per mode.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> symplectic_form(int n_modes) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat s = Mat::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    s(2 * k, 2 * k + 1) = Scalar(1);
    s(2 * k + 1, 2 * k) = Scalar(-1);
  }
  return s;
}

inline Eigen::Matrix4d symplectic_form4() {
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  s(0, 1) = 1; s(1, 0) = -1;
  s(2, 3) = 1; s(3, 2) = -1;
  return s;
}

struct QuadraticHamiltonian {
  Eigen::Matrix4d V = Eigen::Matrix4d::Zero();
  Eigen::Vector4d c = Eigen::Vector4d::Zero();
};

// Linearized pulsed-coupling Hamiltonian for complex coupling G:
//   H = delta n_c + nu n_m + (G a + G* a^dag) x_m + |G|^2 x_m
//     = 1/2 [delta (x_c^2 + p_c^2) + nu (x_m^2 + p_m^2)]
//       + sqrt(2) (Re G x_c - Im G p_c) x_m + |G|^2 x_m + const.
QuadraticHamiltonian build_linear_hamiltonian(const SystemParams& p, complexd g);

// Pulse generators in coupling space. amplitude is the complex coupling value;
// real part couples through x_c, imaginary part through -p_c.
QuadraticHamiltonian coupling_hamiltonian(complexd g);

// i[A, B] for quadratic generators, itself quadratic:
//   V' = V_B sigma V_A - V_A sigma V_B,  c' = V_B sigma c_A - V_A sigma c_B.
QuadraticHamiltonian lie_bracket_i(const QuadraticHamiltonian& a,
                                   const QuadraticHamiltonian& b);

// Frobenius-style magnitude |V| + |c| used for residual diagnostics.
double generator_norm(const QuadraticHamiltonian& h);

}  // namespace optopulse
