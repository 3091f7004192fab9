#pragma once
// Real polynomials in the six quadratures (x_a, p_a, x_s, p_s, x_m, p_m),
// total degree capped at 3. Degree 3 is all the three-mode model needs, and
// the cap turns an accidental quartic (e.g. multiplying two couplings) into a
// loud error instead of silently wrong dynamics.
//
// The quadratic-flow helpers mirror the two-mode conventions: sigma6 =
// diag(J, J, J); a generator o = 1/2 R^T V R + c^T R moves phase space along
// dR/dt = sigma (V R + c). Substituting the flow over `area` into h yields the
// Weyl symbol of exp(-i o area) h exp(+i o area); for quadratic generators
// this correspondence is exact, not a semiclassical approximation.

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "optopulse/errors.hpp"

namespace optopulse {

inline constexpr int k_poly_vars = 6;
inline constexpr int k_poly_degree_cap = 3;

using Monomial = std::array<std::uint8_t, k_poly_vars>;

class Polynomial {
 public:
  Polynomial() = default;
  static Polynomial variable(int i);
  static Polynomial constant(double v);

  double coefficient(const Monomial& m) const;
  void set(const Monomial& m, double v);
  int degree() const;
  std::size_t term_count() const { return terms_.size(); }
  double max_abs_coefficient() const;
  const std::map<Monomial, double>& terms() const { return terms_; }

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  std::string str() const;

 private:
  std::map<Monomial, double> terms_;  // zero coefficients are pruned
};

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;

Matrix6d symplectic_form6();

// h(R) -> h(L R + d): variable i is replaced by sum_j L(i,j) var_j + d(i).
Polynomial affine_substitute(const Polynomial& h, const Matrix6d& L,
                             const Vector6d& d);

// Flow map of the generator (V, c) over `area`; see header comment.
void quadratic_flow(const Matrix6d& V, const Vector6d& c, double area,
                    Matrix6d* L, Vector6d* d);

// h conjugated by exp(-i o area), o = 1/2 R^T V R + c^T R.
Polynomial conjugate_by_quadratic(const Polynomial& h, const Matrix6d& V,
                                  const Vector6d& c, double area);

}  // namespace optopulse
