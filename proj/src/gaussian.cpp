#include "optopulse/gaussian.hpp"

namespace optopulse {

GaussianState vacuum_state() { return GaussianState{}; }

GaussianState thermal_state(double n_cavity, double n_mech) {
  GaussianState s;
  s.gamma(ix_c, ix_c) = s.gamma(ip_c, ip_c) = 2.0 * n_cavity + 1.0;
  s.gamma(ix_m, ix_m) = s.gamma(ip_m, ip_m) = 2.0 * n_mech + 1.0;
  return s;
}

double phonon_number(const GaussianState& s) {
  double var = (s.gamma(ix_m, ix_m) + s.gamma(ip_m, ip_m) - 2.0) / 4.0;
  double coh = (s.mean(ix_m) * s.mean(ix_m) + s.mean(ip_m) * s.mean(ip_m)) / 2.0;
  return var + coh;
}

double cavity_occupation(const GaussianState& s) {
  double var = (s.gamma(ix_c, ix_c) + s.gamma(ip_c, ip_c) - 2.0) / 4.0;
  double coh = (s.mean(ix_c) * s.mean(ix_c) + s.mean(ip_c) * s.mean(ip_c)) / 2.0;
  return var + coh;
}

double uncertainty_defect(const GaussianState& s) {
  Eigen::Matrix4cd m = s.gamma.cast<complexd>();
  m += complexd(0.0, 1.0) * symplectic_form4().cast<complexd>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace optopulse
