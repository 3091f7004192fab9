#include "optopulse/quadratic.hpp"

#include <cmath>

namespace optopulse {

QuadraticHamiltonian coupling_hamiltonian(complexd g) {
  QuadraticHamiltonian h;
  double re = std::sqrt(2.0) * g.real();
  double im = -std::sqrt(2.0) * g.imag();
  h.V(ix_c, ix_m) = h.V(ix_m, ix_c) = re;
  h.V(ip_c, ix_m) = h.V(ix_m, ip_c) = im;
  h.c(ix_m) = std::norm(g);
  return h;
}

QuadraticHamiltonian build_linear_hamiltonian(const SystemParams& p, complexd g) {
  QuadraticHamiltonian h = coupling_hamiltonian(g);
  h.V(ix_c, ix_c) += p.delta;
  h.V(ip_c, ip_c) += p.delta;
  h.V(ix_m, ix_m) += 1.0;  // nu = 1
  h.V(ip_m, ip_m) += 1.0;
  return h;
}

QuadraticHamiltonian lie_bracket_i(const QuadraticHamiltonian& a,
                                   const QuadraticHamiltonian& b) {
  const Eigen::Matrix4d s = symplectic_form4();
  QuadraticHamiltonian r;
  r.V = b.V * s * a.V - a.V * s * b.V;
  r.c = b.V * s * a.c - a.V * s * b.c;
  return r;
}

double generator_norm(const QuadraticHamiltonian& h) {
  return h.V.cwiseAbs().maxCoeff() + h.c.cwiseAbs().maxCoeff();
}

}  // namespace optopulse
