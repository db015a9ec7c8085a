#include "holonomy/poly.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

namespace holonomy {

Poly::Poly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

Poly Poly::constant(const Rational& c) { return Poly(std::vector<Rational>{c}); }

Poly Poly::x() { return Poly({Rational(0), Rational(1)}); }

void Poly::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

Rational Poly::eval(const Rational& x) const {
  Rational acc(0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Poly operator+(const Poly& a, const Poly& b) {
  std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()), Rational(0));
  for (size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
  for (size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
  return Poly(std::move(c));
}

Poly operator-(const Poly& a, const Poly& b) {
  std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()), Rational(0));
  for (size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
  for (size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
  return Poly(std::move(c));
}

Poly Poly::operator-() const {
  std::vector<Rational> c(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) c[i] = -c_[i];
  return Poly(std::move(c));
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  std::vector<Rational> c(a.c_.size() + b.c_.size() - 1, Rational(0));
  for (size_t i = 0; i < a.c_.size(); ++i)
    for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return Poly(std::move(c));
}

Poly Poly::scaled(const Rational& s) const {
  std::vector<Rational> c(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) c[i] = c_[i] * s;
  return Poly(std::move(c));
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly();
  std::vector<Rational> c(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) c[i - 1] = c_[i] * Rational(static_cast<long>(i));
  return Poly(std::move(c));
}

Poly Poly::monic() const {
  if (is_zero()) return *this;
  return scaled(Rational(1) / leading());
}

void Poly::divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
  if (b.is_zero()) throw std::domain_error("Poly: division by zero polynomial");
  std::vector<Rational> rem = a.c_;
  std::vector<Rational> quo;
  int db = b.degree();
  if (static_cast<int>(rem.size()) - 1 >= db) quo.assign(rem.size() - db, Rational(0));
  Rational lead = b.leading();
  for (int i = static_cast<int>(rem.size()) - 1; i >= db; --i) {
    if (rem[i].is_zero()) continue;
    Rational f = rem[i] / lead;
    quo[i - db] = f;
    for (int j = 0; j <= db; ++j) rem[i - db + j] -= f * b.c_[j];
  }
  q = Poly(std::move(quo));
  r = Poly(std::move(rem));
}

Poly Poly::gcd(const Poly& a, const Poly& b) {
  Poly x = a, y = b, q, r;
  while (!y.is_zero()) {
    divmod(x, y, q, r);
    x = y;
    y = r;
  }
  return x.monic();
}

Poly Poly::extended_gcd(const Poly& a, const Poly& b, Poly& u, Poly& v) {
  Poly r0 = a, r1 = b;
  Poly u0 = Poly::constant(Rational(1)), u1;
  Poly v0, v1 = Poly::constant(Rational(1));
  Poly q, r;
  while (!r1.is_zero()) {
    divmod(r0, r1, q, r);
    Poly u2 = u0 - q * u1;
    Poly v2 = v0 - q * v1;
    r0 = r1; r1 = r;
    u0 = u1; u1 = u2;
    v0 = v1; v1 = v2;
  }
  if (r0.is_zero()) { u = Poly(); v = Poly(); return Poly(); }
  Rational inv = Rational(1) / r0.leading();
  u = u0.scaled(inv);
  v = v0.scaled(inv);
  return r0.monic();
}

namespace {

int sign_at(const std::vector<Poly>& chain, const Rational& x) {
  int changes = 0, last = 0;
  for (const Poly& p : chain) {
    int s = p.eval(x).sign();
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

std::vector<Poly> sturm_chain(const Poly& p) {
  std::vector<Poly> chain;
  chain.push_back(p);
  chain.push_back(p.derivative());
  while (!chain.back().is_zero()) {
    Poly q, r;
    Poly::divmod(chain[chain.size() - 2], chain.back(), q, r);
    chain.push_back(-r);
  }
  chain.pop_back();
  return chain;
}

}  // namespace

int sturm_count(const Poly& p, const Rational& lo, const Rational& hi) {
  if (p.is_zero()) throw std::domain_error("sturm_count: zero polynomial");
  auto chain = sturm_chain(p);
  return sign_at(chain, lo) - sign_at(chain, hi);
}

Rational root_bound(const Poly& p) {
  Rational m(0);
  Rational lead = p.leading().abs();
  for (int k = 0; k < p.degree(); ++k) {
    Rational v = p.coeff(k).abs() / lead;
    if (v > m) m = v;
  }
  return m + Rational(1);
}

namespace {

// --- small prime machinery for the mod-p irreducibility accept ---

using u64 = std::uint64_t;

u64 mulmod(u64 a, u64 b, u64 p) { return (__uint128_t)a * b % p; }

u64 powmod(u64 a, u64 e, u64 p) {
  u64 r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

using FpPoly = std::vector<u64>;  // low-to-high, trimmed

void fp_trim(FpPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

FpPoly fp_mod(FpPoly a, const FpPoly& m, u64 p) {
  u64 inv = powmod(m.back(), p - 2, p);
  while (a.size() >= m.size()) {
    u64 f = mulmod(a.back(), inv, p);
    size_t off = a.size() - m.size();
    for (size_t i = 0; i < m.size(); ++i) {
      u64 t = mulmod(f, m[i], p);
      a[off + i] = (a[off + i] + p - t) % p;
    }
    fp_trim(a);
    if (a.empty()) break;
  }
  return a;
}

FpPoly fp_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& m, u64 p) {
  if (a.empty() || b.empty()) return {};
  FpPoly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      c[i + j] = (c[i + j] + mulmod(a[i], b[j], p)) % p;
  fp_trim(c);
  return fp_mod(std::move(c), m, p);
}

FpPoly fp_powmod(FpPoly base, mpz_class e, const FpPoly& m, u64 p) {
  FpPoly r{1};
  base = fp_mod(std::move(base), m, p);
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) r = fp_mulmod(r, base, m, p);
    base = fp_mulmod(base, base, m, p);
    e >>= 1;
  }
  return r;
}

FpPoly fp_gcd(FpPoly a, FpPoly b, u64 p) {
  while (!b.empty()) {
    FpPoly r = fp_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    u64 inv = powmod(a.back(), p - 2, p);
    for (auto& c : a) c = mulmod(c, inv, p);
  }
  return a;
}

// f irreducible over F_p, for f of degree n: x^(p^n) == x mod f and
// gcd(x^(p^(n/q)) - x, f) = 1 for every prime q | n.
bool fp_irreducible(const FpPoly& f, u64 p) {
  int n = static_cast<int>(f.size()) - 1;
  if (n <= 0) return false;
  FpPoly x{0, 1};
  mpz_class pn;
  mpz_ui_pow_ui(pn.get_mpz_t(), p, n);
  FpPoly xpn = fp_powmod(x, pn, f, p);
  FpPoly diff = xpn;
  // subtract x
  if (diff.size() < 2) diff.resize(2, 0);
  diff[1] = (diff[1] + p - 1) % p;
  fp_trim(diff);
  if (!diff.empty()) return false;
  std::vector<int> primes;
  int m = n;
  for (int q = 2; q * q <= m; ++q)
    while (m % q == 0) {
      if (primes.empty() || primes.back() != q) primes.push_back(q);
      m /= q;
    }
  if (m > 1) primes.push_back(m);
  for (int q : primes) {
    mpz_class e;
    mpz_ui_pow_ui(e.get_mpz_t(), p, n / q);
    FpPoly xp = fp_powmod(x, e, f, p);
    FpPoly d = xp;
    if (d.size() < 2) d.resize(2, 0);
    d[1] = (d[1] + p - 1) % p;
    fp_trim(d);
    if (fp_gcd(d, f, p).size() != 1) return false;
  }
  return true;
}

// Primitive integer form of a rational polynomial (content removed).
std::vector<Integer> primitive_integer_form(const Poly& p) {
  Integer lcm_den(1);
  for (const Rational& c : p.coeffs()) {
    Integer g;
    mpz_lcm(g.get_mpz_t(), lcm_den.get_mpz_t(), c.den().get_mpz_t());
    lcm_den = g;
  }
  std::vector<Integer> zs;
  zs.reserve(p.coeffs().size());
  for (const Rational& c : p.coeffs()) zs.push_back(c.num() * (lcm_den / c.den()));
  Integer content(0);
  for (const Integer& z : zs) {
    Integer g;
    mpz_gcd(g.get_mpz_t(), content.get_mpz_t(), z.get_mpz_t());
    content = g;
  }
  if (content != 0)
    for (Integer& z : zs) z /= content;
  if (!zs.empty() && zs.back() < 0)
    for (Integer& z : zs) z = -z;
  return zs;
}

std::vector<Integer> divisors_of(const Integer& n) {
  Integer a = n < 0 ? Integer(-n) : n;
  std::vector<Integer> ds;
  for (Integer d(1); d * d <= a; ++d) {
    if (a % d == 0) {
      ds.push_back(d);
      if (d * d != a) ds.push_back(a / d);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

bool has_rational_root(const std::vector<Integer>& z) {
  // candidates r/s with r | z[0], s | z[deg]
  if (z.front() == 0) return true;  // x divides
  for (const Integer& r : divisors_of(z.front()))
    for (const Integer& s : divisors_of(z.back()))
      for (int sig : {1, -1}) {
        Rational cand(sig * r, s);
        Rational acc(0);
        for (auto it = z.rbegin(); it != z.rend(); ++it) acc = acc * cand + Rational(*it);
        if (acc.is_zero()) return true;
      }
  return false;
}

// Kronecker factor search: look for an integer factor of degree k (2..n/2).
bool kronecker_has_factor(const std::vector<Integer>& z) {
  int n = static_cast<int>(z.size()) - 1;
  Poly p;
  {
    std::vector<Rational> cs;
    for (const Integer& c : z) cs.push_back(Rational(c));
    p = Poly(std::move(cs));
  }
  for (int k = 2; 2 * k <= n; ++k) {
    // evaluation points 0, 1, -1, 2, -2, ...
    std::vector<Rational> xs;
    for (long t = 0; static_cast<int>(xs.size()) < k + 1; ++t) {
      if (t == 0) xs.push_back(Rational(0));
      else { xs.push_back(Rational(t)); if (static_cast<int>(xs.size()) < k + 1) xs.push_back(Rational(-t)); }
    }
    xs.resize(k + 1);
    std::vector<std::vector<Integer>> choices(k + 1);
    bool degenerate = false;
    for (int i = 0; i <= k; ++i) {
      Rational v = p.eval(xs[i]);
      if (v.is_zero()) { degenerate = true; break; }  // rational root, caught earlier
      for (const Integer& d : divisors_of(v.num())) {
        choices[i].push_back(d);
        choices[i].push_back(-d);
      }
    }
    if (degenerate) return true;
    // enumerate tuples
    std::vector<size_t> idx(k + 1, 0);
    while (true) {
      // Lagrange interpolation through (xs[i], choices[i][idx[i]])
      std::vector<Rational> acc(k + 1, Rational(0));
      for (int i = 0; i <= k; ++i) {
        // basis poly for node i
        std::vector<Rational> basis{Rational(1)};
        Rational denom(1);
        for (int j = 0; j <= k; ++j) {
          if (j == i) continue;
          // basis *= (x - xs[j])
          std::vector<Rational> nb(basis.size() + 1, Rational(0));
          for (size_t t = 0; t < basis.size(); ++t) {
            nb[t + 1] += basis[t];
            nb[t] -= basis[t] * xs[j];
          }
          basis = std::move(nb);
          denom *= xs[i] - xs[j];
        }
        Rational w = Rational(choices[i][idx[i]]) / denom;
        for (size_t t = 0; t < basis.size(); ++t) acc[t] += basis[t] * w;
      }
      Poly g(acc);
      if (g.degree() == k) {
        bool integral = true;
        for (const Rational& c : g.coeffs())
          if (!c.is_integer()) { integral = false; break; }
        if (integral) {
          Poly q, r;
          Poly::divmod(p, g, q, r);
          if (r.is_zero()) return true;
        }
      }
      int pos = 0;
      while (pos <= k && ++idx[pos] == choices[pos].size()) idx[pos++] = 0;
      if (pos > k) break;
    }
  }
  return false;
}

}  // namespace

bool is_irreducible_over_Q(const Poly& p) {
  int n = p.degree();
  if (n < 1) return false;
  if (n == 1) return true;
  std::vector<Integer> z = primitive_integer_form(p);
  if (has_rational_root(z)) return false;
  if (n <= 3) return true;  // no linear factor and deg <= 3
  // squarefree check: gcd(p, p') must be constant
  if (Poly::gcd(p, p.derivative()).degree() > 0) return false;
  static const u64 kPrimes[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
  for (u64 q : kPrimes) {
    if (z.back() % q == 0) continue;
    FpPoly f(z.size());
    for (size_t i = 0; i < z.size(); ++i) {
      Integer m = z[i] % static_cast<long>(q);
      if (m < 0) m += static_cast<long>(q);
      f[i] = m.get_ui();
    }
    fp_trim(f);
    if (f.size() != z.size()) continue;  // degree dropped mod q
    if (fp_irreducible(f, q)) return true;
  }
  return !kronecker_has_factor(z);
}

}  // namespace holonomy
