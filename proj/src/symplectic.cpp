#include "optopulse/symplectic.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace optopulse {

using Eigen::Matrix4d;
using Eigen::Vector4d;

AffinePropagator segment_propagator(const QuadraticHamiltonian& h, double duration) {
  if (duration < 0) throw ConfigError("segment_propagator: negative duration");
  AffinePropagator p;
  if (duration == 0.0) return p;
  const Matrix4d s = symplectic_form4();
  // augmented generator [[sigma V, sigma c], [0, 0]]; its exponential carries
  // the displacement alongside the linear flow
  Eigen::Matrix<double, 5, 5> aug = Eigen::Matrix<double, 5, 5>::Zero();
  aug.topLeftCorner<4, 4>() = s * h.V;
  aug.topRightCorner<4, 1>() = s * h.c;
  Eigen::Matrix<double, 5, 5> e = (aug * duration).exp();
  p.S = e.topLeftCorner<4, 4>();
  p.d = e.topRightCorner<4, 1>();
  return p;
}

AffinePropagator compose(const AffinePropagator& second, const AffinePropagator& first) {
  AffinePropagator r;
  r.S = second.S * first.S;
  r.d = second.S * first.d + second.d;
  return r;
}

AffinePropagator compose(const std::vector<AffinePropagator>& seq) {
  AffinePropagator acc;
  for (auto it = seq.rbegin(); it != seq.rend(); ++it) acc = compose(*it, acc);
  return acc;
}

AffinePropagator inverse(const AffinePropagator& p) {
  const Matrix4d s = symplectic_form4();
  AffinePropagator r;
  r.S = -s * p.S.transpose() * s;  // S^{-1} for symplectic S
  r.d = -(r.S * p.d);
  return r;
}

GaussianState apply(const AffinePropagator& p, const GaussianState& s) {
  GaussianState out;
  out.gamma = p.S * s.gamma * p.S.transpose();
  out.mean = p.S * s.mean + p.d;
  return out;
}

double symplectic_defect(const Matrix4d& s) {
  const Matrix4d sf = symplectic_form4();
  return (s * sf * s.transpose() - sf).cwiseAbs().maxCoeff();
}

ConjugationResult bch_effective_hamiltonian(const QuadraticHamiltonian& h,
                                            const QuadraticHamiltonian& pulse,
                                            double strength, double t_p,
                                            bool strict) {
  const double area = strength * t_p;
  const Matrix4d s = symplectic_form4();

  ConjugationResult r;

  // first-order substitution h -> h + area * (-i)[pulse, h]
  QuadraticHamiltonian br = lie_bracket_i(pulse, h);
  r.first_order.V = h.V - area * br.V;
  r.first_order.c = h.c - area * br.c;

  // dropped double bracket, reported as a diagnostic
  QuadraticHamiltonian dbr = lie_bracket_i(pulse, br);
  r.residual.V = 0.5 * area * area * dbr.V;
  r.residual.c = 0.5 * area * area * dbr.c;
  r.residual_norm = generator_norm(r.residual);

  if (strict && r.residual_norm > 1e-12 * (generator_norm(h) + 1.0)) {
    std::ostringstream msg;
    msg << "bch_effective_hamiltonian: the double bracket [o,[o,h]] does not "
           "vanish (residual magnitude "
        << r.residual_norm
        << "); the first-order substitution is not exact for this sequence";
    throw ConfigError(msg.str());
  }

  // exact conjugation through the pulse's affine flow R -> Lambda R + d
  Eigen::Matrix<double, 5, 5> aug = Eigen::Matrix<double, 5, 5>::Zero();
  aug.topLeftCorner<4, 4>() = -s * pulse.V;
  aug.topRightCorner<4, 1>() = -s * pulse.c;
  Eigen::Matrix<double, 5, 5> e = (aug * area).exp();
  Matrix4d lam = e.topLeftCorner<4, 4>();
  Vector4d d = e.topRightCorner<4, 1>();
  r.effective.V = lam.transpose() * h.V * lam;
  r.effective.c = lam.transpose() * (h.V * d + h.c);
  return r;
}

BogoliubovParams bogoliubov_from_quadratic(double alpha, double beta) {
  if (alpha <= 0 || beta <= 0)
    throw ConfigError("bogoliubov_from_quadratic: need alpha > 0 and beta > 0");
  BogoliubovParams bp;
  bp.alpha = alpha;
  bp.beta = beta;
  double root = std::pow(alpha * beta, 0.25);
  bp.u = 0.5 * (std::sqrt(alpha) + std::sqrt(beta)) / root;
  bp.v = 0.5 * (std::sqrt(alpha) - std::sqrt(beta)) / root;
  bp.delta_prime = 2.0 * std::sqrt(alpha * beta);
  bp.z_plus = std::pow(alpha / beta, 0.25);
  bp.z_minus = std::pow(beta / alpha, 0.25);
  return bp;
}

double beamsplitter_invariance_check(const BogoliubovParams& s_mode,
                                     const BogoliubovParams& m_mode) {
  // basis (x_s, p_s, x_m, p_m); mode m mirrored, see header
  Vector4d diag(s_mode.z_minus, s_mode.z_plus, m_mode.z_plus, m_mode.z_minus);
  Matrix4d t = diag.asDiagonal();
  Matrix4d f = Matrix4d::Zero();
  f(0, 2) = f(2, 0) = 1.0;
  f(1, 3) = f(3, 1) = 1.0;
  return (t.transpose() * f * t - f).cwiseAbs().maxCoeff();
}

}  // namespace optopulse
