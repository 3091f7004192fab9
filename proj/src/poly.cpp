#include "optopulse/poly.hpp"

#include <cmath>
#include <cstdio>

#include <unsupported/Eigen/MatrixFunctions>

#include "optopulse/terms.hpp"

namespace optopulse {

namespace {

int monomial_degree(const Monomial& m) {
  int d = 0;
  for (auto e : m) d += e;
  return d;
}

const char* k_var_names[k_poly_vars] = {"x_a", "p_a", "x_s", "p_s", "x_m", "p_m"};

}  // namespace

Polynomial Polynomial::variable(int i) {
  if (i < 0 || i >= k_poly_vars) throw ConfigError("polynomial variable index out of range");
  Polynomial p;
  Monomial m{};
  m[i] = 1;
  p.terms_[m] = 1.0;
  return p;
}

Polynomial Polynomial::constant(double v) {
  Polynomial p;
  if (v != 0.0) p.terms_[Monomial{}] = v;
  return p;
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::set(const Monomial& m, double v) {
  if (monomial_degree(m) > k_poly_degree_cap)
    throw ConfigError("polynomial term exceeds the degree-3 cap");
  if (!std::isfinite(v)) throw ConfigError("polynomial coefficient must be finite");
  if (v == 0.0)
    terms_.erase(m);
  else
    terms_[m] = v;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, monomial_degree(m));
  return d;
}

double Polynomial::max_abs_coefficient() const {
  double v = 0.0;
  for (const auto& [m, c] : terms_) v = std::max(v, std::abs(c));
  return v;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) {
    double v = (terms_[m] += c);
    if (v == 0.0) terms_.erase(m);
  }
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) {
    double v = (terms_[m] -= c);
    if (v == 0.0) terms_.erase(m);
  }
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m;
      for (int i = 0; i < k_poly_vars; ++i) m[i] = ma[i] + mb[i];
      if (monomial_degree(m) > k_poly_degree_cap)
        throw ConfigError("polynomial product exceeds the degree-3 cap");
      double v = (out.terms_[m] += ca * cb);
      if (v == 0.0) out.terms_.erase(m);
    }
  }
  return out;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  char buf[64];
  for (const auto& [m, c] : terms_) {
    if (!out.empty()) out += c < 0 ? " - " : " + ";
    else if (c < 0) out += "-";
    std::snprintf(buf, sizeof(buf), "%.6g", std::abs(c));
    out += buf;
    for (int i = 0; i < k_poly_vars; ++i) {
      for (int k = 0; k < m[i]; ++k) {
        out += " ";
        out += k_var_names[i];
      }
    }
  }
  return out;
}

Matrix6d symplectic_form6() {
  Matrix6d s = Matrix6d::Zero();
  for (int m = 0; m < 3; ++m) {
    s(2 * m, 2 * m + 1) = 1.0;
    s(2 * m + 1, 2 * m) = -1.0;
  }
  return s;
}

Polynomial affine_substitute(const Polynomial& h, const Matrix6d& L,
                             const Vector6d& d) {
  Polynomial out;
  for (const auto& [m, c] : h.terms()) {
    Polynomial term = Polynomial::constant(c);
    for (int i = 0; i < k_poly_vars; ++i) {
      if (m[i] == 0) continue;
      Polynomial lin = Polynomial::constant(d(i));
      for (int j = 0; j < k_poly_vars; ++j)
        if (L(i, j) != 0.0) lin += L(i, j) * Polynomial::variable(j);
      for (int k = 0; k < m[i]; ++k) term = term * lin;
    }
    out += term;
  }
  return out;
}

void quadratic_flow(const Matrix6d& V, const Vector6d& c, double area,
                    Matrix6d* L, Vector6d* d) {
  Matrix6d s6 = symplectic_form6();
  Eigen::Matrix<double, 7, 7> aug = Eigen::Matrix<double, 7, 7>::Zero();
  aug.topLeftCorner<6, 6>() = -s6 * V;
  aug.topRightCorner<6, 1>() = -s6 * c;
  Eigen::Matrix<double, 7, 7> e = (aug * area).exp();
  *L = e.topLeftCorner<6, 6>();
  *d = e.topRightCorner<6, 1>();
}

Polynomial conjugate_by_quadratic(const Polynomial& h, const Matrix6d& V,
                                  const Vector6d& c, double area) {
  Matrix6d L;
  Vector6d d;
  quadratic_flow(V, c, area, &L, &d);
  return affine_substitute(h, L, d);
}

std::vector<HamiltonianTerm> to_operator_terms(const Polynomial& h) {
  std::vector<HamiltonianTerm> out;
  out.reserve(h.term_count());
  for (const auto& [m, c] : h.terms()) {
    HamiltonianTerm t;
    t.coeff = c;
    for (int mode = 0; mode < 3; ++mode) {
      int ex = m[2 * mode], ep = m[2 * mode + 1];
      if (ex > 0 && ep > 0)
        throw ConfigError("monomial mixes x and p on one mode; no Hermitian ordering");
      if (ex > 0) t.factors.push_back({mode, FactorKind::position, ex});
      if (ep > 0) t.factors.push_back({mode, FactorKind::momentum, ep});
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace optopulse
