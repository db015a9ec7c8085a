#pragma once

#include <optional>
#include <vector>

#include "holonomy/rational.hpp"

namespace holonomy {

// Dense univariate polynomial over Q, coefficients low-to-high, no trailing
// zeros (zero polynomial = empty vector).
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<Rational> coeffs);
  static Poly constant(const Rational& c);
  static Poly x();

  const std::vector<Rational>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for 0
  Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }
  Rational coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : Rational(0);
  }

  Rational eval(const Rational& x) const;

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly operator-() const;
  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

  Poly scaled(const Rational& s) const;
  Poly derivative() const;
  Poly monic() const;

  // Euclidean division; b must be nonzero.
  static void divmod(const Poly& a, const Poly& b, Poly& q, Poly& r);
  static Poly gcd(const Poly& a, const Poly& b);
  // g = gcd(a,b) monic, with u*a + v*b = g.
  static Poly extended_gcd(const Poly& a, const Poly& b, Poly& u, Poly& v);

 private:
  void trim();
  std::vector<Rational> c_;
};

// Number of distinct real roots of squarefree p in the half-open interval
// (lo, hi], by Sturm's theorem.
int sturm_count(const Poly& p, const Rational& lo, const Rational& hi);

// Cauchy-style bound M: all real roots of p lie in [-M, M].
Rational root_bound(const Poly& p);

// Exact irreducibility over Q. Expects deg >= 1. Uses rational-root and
// low-degree shortcuts, an irreducible-mod-p accept, and a Kronecker-style
// factor search as the complete fallback.
bool is_irreducible_over_Q(const Poly& p);

}  // namespace holonomy
