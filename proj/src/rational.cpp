#include "holonomy/rational.hpp"

namespace holonomy {

Rational Rational::parse(const std::string& s) {
  auto bad = [&] { return std::invalid_argument("Rational: cannot parse '" + s + "'"); };
  if (s.empty()) throw bad();
  std::string::size_type slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(Integer(s));
    Integer n(s.substr(0, slash));
    Integer d(s.substr(slash + 1));
    if (d == 0) throw bad();
    return Rational(n, d);
  } catch (const std::invalid_argument&) {
    throw bad();
  }
}

std::string Rational::str() const {
  if (is_integer()) return q_.get_num().get_str();
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

Rational rational_pow(const Rational& b, long e) {
  if (e < 0) return Rational(1) / rational_pow(b, -e);
  Rational r(1), base = b;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

}  // namespace holonomy
