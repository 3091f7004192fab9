#pragma once
// Hermitian operator terms handed to the number-state engine. A term is a
// coefficient times a product of per-mode factors; factors on distinct modes
// commute, so the product is unambiguous. Same-mode x*p products have no
// Hermitian reading without an ordering rule and are rejected at conversion.

#include <vector>

#include "optopulse/poly.hpp"

namespace optopulse {

enum class FactorKind { position, momentum, number };

struct OperatorFactor {
  int mode = 0;
  FactorKind kind = FactorKind::position;
  int power = 1;
};

struct HamiltonianTerm {
  double coeff = 0.0;
  std::vector<OperatorFactor> factors;  // empty: constant term
};

// One term per monomial, in the polynomial's deterministic order. Throws
// ConfigError when a monomial mixes x and p on the same mode.
std::vector<HamiltonianTerm> to_operator_terms(const Polynomial& h);

}  // namespace optopulse
