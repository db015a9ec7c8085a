#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "holonomy/poly.hpp"

namespace holonomy {

struct FieldMismatch : std::logic_error {
  FieldMismatch() : std::logic_error("operands belong to different fields") {}
};

// A real algebraic number field Q(alpha): alpha is pinned down by a monic
// irreducible minimal polynomial together with a rational isolating interval
// (lo, hi) that contains exactly one real root.
class FieldSpec {
 public:
  // Throws std::invalid_argument if the polynomial is not monic irreducible
  // or the interval does not isolate exactly one real root.
  FieldSpec(Poly min_poly, Rational lo, Rational hi, int approx_precision = 64);

  static std::shared_ptr<const FieldSpec> rationals();  // alpha = 0, degree 1
  static std::shared_ptr<const FieldSpec> sqrt2();      // x^2 - 2 on (1, 2)

  int degree() const { return min_poly_.degree(); }
  const Poly& min_poly() const { return min_poly_; }
  std::pair<Rational, Rational> interval() const { return {lo_, hi_}; }
  int approx_precision() const { return precision_; }

  // Bisects the isolating interval k more times; pure.
  std::pair<Rational, Rational> refined(const Rational& lo, const Rational& hi,
                                        int k) const;

  bool same_as(const FieldSpec& other) const;

 private:
  Poly min_poly_;
  Rational lo_, hi_;
  int precision_;
};

using FieldPtr = std::shared_ptr<const FieldSpec>;

// Element of Q(alpha), stored as coefficients of 1, alpha, ..., alpha^{d-1}.
class Scalar {
 public:
  Scalar() = default;  // null scalar; only assignable
  Scalar(FieldPtr field, std::vector<Rational> coeffs);
  static Scalar of(FieldPtr field, const Rational& r);
  static Scalar zero(FieldPtr field) { return of(std::move(field), Rational(0)); }
  static Scalar one(FieldPtr field) { return of(std::move(field), Rational(1)); }
  static Scalar alpha(FieldPtr field);

  const FieldPtr& field() const { return field_; }
  const std::vector<Rational>& coeffs() const { return c_; }

  bool is_zero() const;
  bool is_rational() const;
  // Only valid when is_rational().
  Rational rational_value() const;

  Scalar operator-() const;
  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend Scalar operator/(const Scalar& a, const Scalar& b);
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar& operator/=(const Scalar& o) { return *this = *this / o; }
  Scalar operator*(const Rational& r) const;
  friend bool operator==(const Scalar& a, const Scalar& b);
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  Scalar inverse() const;

  // Exact sign: -1, 0, +1.  Zero test is exact; otherwise the isolating
  // interval is refined until the value interval excludes zero.
  int sign() const;

  bool operator<(const Scalar& o) const { return (*this - o).sign() < 0; }
  bool operator<=(const Scalar& o) const { return (*this - o).sign() <= 0; }
  bool operator>(const Scalar& o) const { return (*this - o).sign() > 0; }
  bool operator>=(const Scalar& o) const { return (*this - o).sign() >= 0; }

  Scalar abs() const { return sign() < 0 ? -*this : *this; }

  // Floating approximation honoring the field's approx_precision (for
  // rendering only; never used in decisions).
  double approx() const;

  // Enclosing rational interval [lo, hi] after k extra refinements.
  std::pair<Rational, Rational> enclosure(int extra_bits) const;

 private:
  void check_same_field(const Scalar& o) const;
  FieldPtr field_;
  std::vector<Rational> c_;
};

// Complex number with both parts in Q(alpha).
class ExactComplex {
 public:
  ExactComplex() = default;
  ExactComplex(Scalar re, Scalar im);
  static ExactComplex zero(const FieldPtr& f);
  static ExactComplex of(const FieldPtr& f, const Rational& re, const Rational& im);

  const Scalar& re() const { return re_; }
  const Scalar& im() const { return im_; }
  const FieldPtr& field() const { return re_.field(); }

  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }

  ExactComplex operator-() const { return ExactComplex(-re_, -im_); }
  friend ExactComplex operator+(const ExactComplex& a, const ExactComplex& b);
  friend ExactComplex operator-(const ExactComplex& a, const ExactComplex& b);
  friend ExactComplex operator*(const ExactComplex& a, const ExactComplex& b);
  ExactComplex& operator+=(const ExactComplex& o) { return *this = *this + o; }
  ExactComplex& operator-=(const ExactComplex& o) { return *this = *this - o; }
  ExactComplex operator*(const Scalar& s) const { return ExactComplex(re_ * s, im_ * s); }
  ExactComplex operator*(const Rational& r) const { return ExactComplex(re_ * r, im_ * r); }
  friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const ExactComplex& a, const ExactComplex& b) { return !(a == b); }

  ExactComplex conj() const { return ExactComplex(re_, -im_); }
  // i * z = (-im, re): exact quarter turn.
  ExactComplex rot90() const { return ExactComplex(-im_, re_); }
  Scalar norm2() const { return re_ * re_ + im_ * im_; }

 private:
  Scalar re_, im_;
};

// Im(conj(a) * b): positive iff b lies counterclockwise of a.
Scalar cross(const ExactComplex& a, const ExactComplex& b);
// Re(conj(a) * b).
Scalar dot(const ExactComplex& a, const ExactComplex& b);

// true iff a and b are positively parallel (same direction, both nonzero).
bool same_direction(const ExactComplex& a, const ExactComplex& b);
// true iff b = t*a for some real t (a nonzero).
bool parallel(const ExactComplex& a, const ExactComplex& b);

// If b = t*a for rational t (both in the field, a != 0 and collinear over R),
// returns t; nullopt when the real ratio is irrational.
std::optional<Rational> rational_ratio(const ExactComplex& a, const ExactComplex& b);

// Real ratio b/a for collinear nonzero a, b (as a Scalar).
Scalar real_ratio(const ExactComplex& a, const ExactComplex& b);

struct LatticeResult {
  enum class Kind { Trivial, RankOne, Lattice, Dense };
  Kind kind;
  // RankOne: generator in e1.  Lattice: basis e1, e2 with area > 0.
  ExactComplex e1, e2;
  Scalar area;
};

// Classifies the Z-span of the generators inside C.  Exact: embeds each
// generator as a rational vector over the coefficient basis, takes a Hermite
// normal form over Z, and inspects the resulting basis.
LatticeResult lattice_detect(const std::vector<ExactComplex>& generators);

// true iff z lies in the Z-span of the given generators (exact).
bool zspan_contains(const std::vector<ExactComplex>& generators, const ExactComplex& z);

}  // namespace holonomy
