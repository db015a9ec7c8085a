#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace holonomy {

using Integer = mpz_class;

// Canonical rational: gcd(|num|, den) = 1, den > 0.  mpq_class does not
// canonicalize raw constructions, so every entry point below does.
class Rational {
 public:
  Rational() : q_(0) {}
  Rational(long n) : q_(n) {}
  Rational(const Integer& n) : q_(n) {}
  Rational(long n, long d) : q_(n, d) { normalize(); }
  Rational(const Integer& n, const Integer& d) : q_(n, d) { normalize(); }
  explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

  // Parses "p/q" or "p".
  static Rational parse(const std::string& s);

  const mpq_class& raw() const { return q_; }
  Integer num() const { return q_.get_num(); }
  Integer den() const { return q_.get_den(); }

  bool is_zero() const { return sgn(q_) == 0; }
  bool is_integer() const { return q_.get_den() == 1; }
  int sign() const { return sgn(q_); }

  Rational operator-() const { return Rational(mpq_class(-q_), tag{}); }
  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("Rational: division by zero");
    q_ /= o.q_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.q_ < b.q_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.q_ <= b.q_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.q_ > b.q_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.q_ >= b.q_; }

  Rational abs() const { return sign() < 0 ? -*this : *this; }

  // "p/q" with q omitted when 1; stable across runs.
  std::string str() const;

  double to_double() const { return q_.get_d(); }

 private:
  struct tag {};
  Rational(mpq_class q, tag) : q_(std::move(q)) {}  // already canonical
  void normalize() {
    if (q_.get_den() == 0) throw std::domain_error("Rational: zero denominator");
    q_.canonicalize();
  }
  mpq_class q_;
};

Rational rational_pow(const Rational& b, long e);

}  // namespace holonomy
