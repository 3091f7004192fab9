#pragma once
// Exact Gaussian-dynamics backbone: closed-form affine phase-space propagators
// for piecewise-constant quadratic Hamiltonians, their composition, the
// pulse-frame effective Hamiltonian, and the two-frequency Bogoliubov normal
// form. Everything here is the ground truth the approximate predictions are
// tested against.

#include <Eigen/Dense>

#include "optopulse/gaussian.hpp"
#include "optopulse/quadratic.hpp"

namespace optopulse {

struct AffinePropagator {
  Eigen::Matrix4d S = Eigen::Matrix4d::Identity();  // symplectic linear part
  Eigen::Vector4d d = Eigen::Vector4d::Zero();      // displacement
};

// Exact propagator of dR/dt = sigma (V R + c) over the given duration,
// computed through the augmented-matrix exponential.
AffinePropagator segment_propagator(const QuadraticHamiltonian& h, double duration);

// Applies `first`, then `second`.
AffinePropagator compose(const AffinePropagator& second, const AffinePropagator& first);
// Right-to-left composition of a whole sequence: seq.back() acts first.
AffinePropagator compose(const std::vector<AffinePropagator>& seq);

AffinePropagator inverse(const AffinePropagator& p);

GaussianState apply(const AffinePropagator& p, const GaussianState& s);

// max |S sigma S^T - sigma|, zero for exactly symplectic S.
double symplectic_defect(const Eigen::Matrix4d& s);

// Effective Hamiltonian seen between a strong pulse pair, for the
// time-ordered sequence
//   exp(-i o w t_p) . exp(-i h t_f) . exp(+i o w t_p)   (rightmost first),
// which equals exp(-i h_eff t_f) with h_eff = exp(-i o w t_p) h exp(+i o w t_p).
// `effective` carries the conjugation exactly: the pulse generates the affine
// substitution R -> Lambda R + d_o with Lambda = exp(-sigma V_o w t_p), and
// substituting into h keeps all orders in the pulse area. `first_order` is
// the truncation h + w t_p * (-i)[o, h]; its cross-coupling coefficients agree
// with `effective` exactly whenever (sigma V_o)^2 = 0, which holds for the
// single-product pulses used by the compiler. `residual` is the dropped
// double bracket -i[o, -i[o, h]] * (w t_p)^2 / 2, reported for diagnostics.
struct ConjugationResult {
  QuadraticHamiltonian effective;
  QuadraticHamiltonian first_order;
  QuadraticHamiltonian residual;
  double residual_norm = 0.0;
};
ConjugationResult bch_effective_hamiltonian(const QuadraticHamiltonian& h,
                                            const QuadraticHamiltonian& pulse,
                                            double strength, double t_p,
                                            bool strict = false);

struct BogoliubovParams {
  double alpha = 0.0;        // coefficient of x^2
  double beta = 0.0;         // coefficient of p^2
  double u = 1.0;            // b = u a + v a^dag
  double v = 0.0;
  double delta_prime = 0.0;  // 2 sqrt(alpha beta)
  double z_plus = 1.0;       // (alpha/beta)^{1/4}; p = z_plus p'
  double z_minus = 1.0;      // (beta/alpha)^{1/4}; x = z_minus x'
};

// Normal form of alpha x^2 + beta p^2 = delta_prime (b^dag b + 1/2).
BogoliubovParams bogoliubov_from_quadratic(double alpha, double beta);

// Deviation of the x_s x_m + p_s p_m form under the two-mode normal-form
// change of basis. Mode s substitutes (x, p) -> (z_minus x', z_plus p'); mode
// m receives the mirrored assignment (z_plus x', z_minus p'), which is how the
// transformation arises when one mode absorbs a p^2 correction and the other
// an x^2 one. For equal (alpha, beta) the complementary factors cancel
// (z_minus z_plus = 1) and the form is exactly invariant.
double beamsplitter_invariance_check(const BogoliubovParams& s_mode,
                                     const BogoliubovParams& m_mode);

}  // namespace optopulse
