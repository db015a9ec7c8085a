#include "holonomy/field.hpp"

#include <algorithm>

namespace holonomy {

FieldSpec::FieldSpec(Poly min_poly, Rational lo, Rational hi, int approx_precision)
    : min_poly_(std::move(min_poly)), lo_(std::move(lo)), hi_(std::move(hi)),
      precision_(approx_precision) {
  if (min_poly_.degree() < 1) throw std::invalid_argument("FieldSpec: degree must be >= 1");
  if (min_poly_.leading() != Rational(1))
    throw std::invalid_argument("FieldSpec: minimal polynomial must be monic");
  if (!is_irreducible_over_Q(min_poly_))
    throw std::invalid_argument("FieldSpec: minimal polynomial must be irreducible over Q");
  if (!(lo_ < hi_)) throw std::invalid_argument("FieldSpec: empty isolating interval");
  if (min_poly_.degree() >= 2) {
    if (min_poly_.eval(lo_).is_zero() || min_poly_.eval(hi_).is_zero())
      throw std::invalid_argument("FieldSpec: interval endpoint is a root");
    if (sturm_count(min_poly_, lo_, hi_) != 1)
      throw std::invalid_argument("FieldSpec: interval must isolate exactly one real root");
  } else {
    Rational root = -min_poly_.coeff(0);
    if (!(lo_ < root && root < hi_))
      throw std::invalid_argument("FieldSpec: interval must contain the root");
  }
  if (precision_ <= 0) throw std::invalid_argument("FieldSpec: precision must be positive");
}

FieldPtr FieldSpec::rationals() {
  static const FieldPtr f =
      std::make_shared<FieldSpec>(Poly::x(), Rational(-1), Rational(1));
  return f;
}

FieldPtr FieldSpec::sqrt2() {
  static const FieldPtr f = std::make_shared<FieldSpec>(
      Poly({Rational(-2), Rational(0), Rational(1)}), Rational(1), Rational(2));
  return f;
}

std::pair<Rational, Rational> FieldSpec::refined(const Rational& lo, const Rational& hi,
                                                 int k) const {
  if (degree() == 1) {
    Rational root = -min_poly_.coeff(0);
    Rational eps = (hi - lo) / rational_pow(Rational(2), k + 1);
    return {root - eps, root + eps};
  }
  Rational a = lo, b = hi;
  int sa = min_poly_.eval(a).sign();
  for (int i = 0; i < k; ++i) {
    Rational m = (a + b) / Rational(2);
    int sm = min_poly_.eval(m).sign();
    // m is never a root: irreducible of degree >= 2 has no rational roots
    if (sm == sa) a = m;
    else b = m;
  }
  return {a, b};
}

bool FieldSpec::same_as(const FieldSpec& other) const {
  if (this == &other) return true;
  return min_poly_ == other.min_poly_ && lo_ == other.lo_ && hi_ == other.hi_;
}

Scalar::Scalar(FieldPtr field, std::vector<Rational> coeffs)
    : field_(std::move(field)), c_(std::move(coeffs)) {
  if (!field_) throw std::invalid_argument("Scalar: null field");
  if (static_cast<int>(c_.size()) != field_->degree())
    throw std::invalid_argument("Scalar: coefficient count must equal the field degree");
}

Scalar Scalar::of(FieldPtr field, const Rational& r) {
  std::vector<Rational> c(field->degree(), Rational(0));
  c[0] = r;
  return Scalar(std::move(field), std::move(c));
}

Scalar Scalar::alpha(FieldPtr field) {
  if (field->degree() == 1) {
    Rational root = -field->min_poly().coeff(0);
    return of(std::move(field), root);
  }
  std::vector<Rational> c(field->degree(), Rational(0));
  c[1] = Rational(1);
  return Scalar(std::move(field), std::move(c));
}

bool Scalar::is_zero() const {
  for (const Rational& r : c_)
    if (!r.is_zero()) return false;
  return true;
}

bool Scalar::is_rational() const {
  for (size_t i = 1; i < c_.size(); ++i)
    if (!c_[i].is_zero()) return false;
  return true;
}

Rational Scalar::rational_value() const {
  if (!is_rational()) throw std::logic_error("Scalar: not rational");
  return c_[0];
}

void Scalar::check_same_field(const Scalar& o) const {
  if (field_.get() == o.field_.get()) return;
  if (!field_ || !o.field_ || !field_->same_as(*o.field_)) throw FieldMismatch();
}

Scalar Scalar::operator-() const {
  std::vector<Rational> c(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) c[i] = -c_[i];
  return Scalar(field_, std::move(c));
}

Scalar operator+(const Scalar& a, const Scalar& b) {
  a.check_same_field(b);
  std::vector<Rational> c(a.c_.size());
  for (size_t i = 0; i < c.size(); ++i) c[i] = a.c_[i] + b.c_[i];
  return Scalar(a.field_, std::move(c));
}

Scalar operator-(const Scalar& a, const Scalar& b) {
  a.check_same_field(b);
  std::vector<Rational> c(a.c_.size());
  for (size_t i = 0; i < c.size(); ++i) c[i] = a.c_[i] - b.c_[i];
  return Scalar(a.field_, std::move(c));
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  a.check_same_field(b);
  Poly pa(a.c_), pb(b.c_);
  Poly prod = pa * pb;
  Poly q, r;
  Poly::divmod(prod, a.field_->min_poly(), q, r);
  std::vector<Rational> c(a.c_.size(), Rational(0));
  for (int i = 0; i <= r.degree(); ++i) c[i] = r.coeff(i);
  return Scalar(a.field_, std::move(c));
}

Scalar Scalar::operator*(const Rational& r) const {
  std::vector<Rational> c(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) c[i] = c_[i] * r;
  return Scalar(field_, std::move(c));
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw std::domain_error("Scalar: division by zero");
  if (is_rational()) return of(field_, Rational(1) / c_[0]);
  Poly u, v;
  Poly g = Poly::extended_gcd(Poly(c_), field_->min_poly(), u, v);
  // minimal polynomial is irreducible, so g = 1 and u * this = 1 mod min_poly
  if (g.degree() != 0) throw std::logic_error("Scalar: inverse failed (field corrupt)");
  Poly q, r;
  Poly::divmod(u.scaled(Rational(1) / g.coeff(0)), field_->min_poly(), q, r);
  std::vector<Rational> c(c_.size(), Rational(0));
  for (int i = 0; i <= r.degree(); ++i) c[i] = r.coeff(i);
  return Scalar(field_, std::move(c));
}

Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inverse(); }

bool operator==(const Scalar& a, const Scalar& b) {
  a.check_same_field(b);
  return a.c_ == b.c_;
}

namespace {

// Interval Horner: value enclosure of the coefficient polynomial at [lo, hi].
std::pair<Rational, Rational> horner_interval(const std::vector<Rational>& c,
                                              const Rational& lo, const Rational& hi) {
  Rational vlo(0), vhi(0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    Rational p1 = vlo * lo, p2 = vlo * hi, p3 = vhi * lo, p4 = vhi * hi;
    Rational mn = std::min(std::min(p1, p2), std::min(p3, p4));
    Rational mx = std::max(std::max(p1, p2), std::max(p3, p4));
    vlo = mn + *it;
    vhi = mx + *it;
  }
  return {vlo, vhi};
}

}  // namespace

int Scalar::sign() const {
  if (is_zero()) return 0;
  if (is_rational()) return c_[0].sign();
  auto [lo, hi] = field_->interval();
  while (true) {
    auto [vlo, vhi] = horner_interval(c_, lo, hi);
    if (vlo.sign() > 0) return 1;
    if (vhi.sign() < 0) return -1;
    std::tie(lo, hi) = field_->refined(lo, hi, 1);
  }
}

std::pair<Rational, Rational> Scalar::enclosure(int extra_bits) const {
  auto [lo, hi] = field_->interval();
  std::tie(lo, hi) = field_->refined(lo, hi, extra_bits);
  return horner_interval(c_, lo, hi);
}

double Scalar::approx() const {
  auto [vlo, vhi] = enclosure(field_->approx_precision());
  return ((vlo + vhi) / Rational(2)).to_double();
}

ExactComplex::ExactComplex(Scalar re, Scalar im) : re_(std::move(re)), im_(std::move(im)) {
  if (re_.field() && im_.field()) re_.field()->same_as(*im_.field());
}

ExactComplex ExactComplex::zero(const FieldPtr& f) {
  return ExactComplex(Scalar::zero(f), Scalar::zero(f));
}

ExactComplex ExactComplex::of(const FieldPtr& f, const Rational& re, const Rational& im) {
  return ExactComplex(Scalar::of(f, re), Scalar::of(f, im));
}

ExactComplex operator+(const ExactComplex& a, const ExactComplex& b) {
  return ExactComplex(a.re_ + b.re_, a.im_ + b.im_);
}

ExactComplex operator-(const ExactComplex& a, const ExactComplex& b) {
  return ExactComplex(a.re_ - b.re_, a.im_ - b.im_);
}

ExactComplex operator*(const ExactComplex& a, const ExactComplex& b) {
  return ExactComplex(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
}

Scalar cross(const ExactComplex& a, const ExactComplex& b) {
  return a.re() * b.im() - a.im() * b.re();
}

Scalar dot(const ExactComplex& a, const ExactComplex& b) {
  return a.re() * b.re() + a.im() * b.im();
}

bool same_direction(const ExactComplex& a, const ExactComplex& b) {
  if (a.is_zero() || b.is_zero()) return false;
  return cross(a, b).is_zero() && dot(a, b).sign() > 0;
}

bool parallel(const ExactComplex& a, const ExactComplex& b) {
  return cross(a, b).is_zero();
}

Scalar real_ratio(const ExactComplex& a, const ExactComplex& b) {
  if (a.is_zero()) throw std::domain_error("real_ratio: zero base");
  if (!parallel(a, b)) throw std::domain_error("real_ratio: not collinear");
  return dot(a, b) / a.norm2();
}

std::optional<Rational> rational_ratio(const ExactComplex& a, const ExactComplex& b) {
  Scalar t = real_ratio(a, b);
  if (!t.is_rational()) return std::nullopt;
  return t.rational_value();
}

namespace {

// Row Hermite normal form of an integer matrix (rows span the module).
// Returns the nonzero rows (the canonical Z-basis of the row span).
std::vector<std::vector<Integer>> hnf_rows(std::vector<std::vector<Integer>> m) {
  if (m.empty()) return {};
  const size_t cols = m[0].size();
  size_t row = 0;
  for (size_t col = 0; col < cols && row < m.size(); ++col) {
    // gcd-eliminate column col below 'row'
    while (true) {
      size_t pivot = row;
      bool nonzero = false;
      for (size_t i = row; i < m.size(); ++i)
        if (m[i][col] != 0 &&
            (!nonzero || abs(m[i][col]) < abs(m[pivot][col]) || m[pivot][col] == 0)) {
          pivot = i;
          nonzero = true;
        }
      if (!nonzero) break;
      std::swap(m[row], m[pivot]);
      bool clean = true;
      for (size_t i = row + 1; i < m.size(); ++i) {
        if (m[i][col] == 0) continue;
        Integer q = m[i][col] / m[row][col];
        for (size_t j = 0; j < cols; ++j) m[i][j] -= q * m[row][j];
        if (m[i][col] != 0) clean = false;
      }
      if (clean) break;
    }
    if (m[row][col] != 0) {
      if (m[row][col] < 0)
        for (size_t j = 0; j < cols; ++j) m[row][j] = -m[row][j];
      // reduce entries above the pivot
      for (size_t i = 0; i < row; ++i) {
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), m[i][col].get_mpz_t(), m[row][col].get_mpz_t());
        if (q != 0)
          for (size_t j = 0; j < cols; ++j) m[i][j] -= q * m[row][j];
      }
      ++row;
    }
  }
  m.resize(row);
  return m;
}

std::vector<Rational> embed(const ExactComplex& z) {
  std::vector<Rational> v;
  v.reserve(z.re().coeffs().size() * 2);
  for (const Rational& r : z.re().coeffs()) v.push_back(r);
  for (const Rational& r : z.im().coeffs()) v.push_back(r);
  return v;
}

ExactComplex unembed(const FieldPtr& f, const std::vector<Rational>& v) {
  int d = f->degree();
  std::vector<Rational> re(v.begin(), v.begin() + d);
  std::vector<Rational> im(v.begin() + d, v.begin() + 2 * d);
  return ExactComplex(Scalar(f, std::move(re)), Scalar(f, std::move(im)));
}

}  // namespace

LatticeResult lattice_detect(const std::vector<ExactComplex>& generators) {
  if (generators.empty()) throw std::invalid_argument("lattice_detect: no generators");
  FieldPtr f = generators[0].field();
  for (const auto& g : generators)
    if (!g.field()->same_as(*f)) throw FieldMismatch();
  const int d = f->degree();

  std::vector<std::vector<Rational>> rv;
  for (const auto& g : generators) rv.push_back(embed(g));

  Integer lcm(1);
  for (const auto& row : rv)
    for (const Rational& r : row) {
      Integer g;
      mpz_lcm(g.get_mpz_t(), lcm.get_mpz_t(), r.den().get_mpz_t());
      lcm = g;
    }
  std::vector<std::vector<Integer>> zm;
  for (const auto& row : rv) {
    std::vector<Integer> zr;
    zr.reserve(row.size());
    for (const Rational& r : row) zr.push_back(r.num() * (lcm / r.den()));
    zm.push_back(std::move(zr));
  }

  auto basis = hnf_rows(std::move(zm));
  LatticeResult res;
  res.e1 = ExactComplex::zero(f);
  res.e2 = ExactComplex::zero(f);
  res.area = Scalar::zero(f);
  if (basis.empty()) {
    res.kind = LatticeResult::Kind::Trivial;
    return res;
  }
  if (basis.size() > 2) {
    res.kind = LatticeResult::Kind::Dense;
    return res;
  }
  auto to_complex = [&](const std::vector<Integer>& row) {
    std::vector<Rational> v(2 * d);
    for (int j = 0; j < 2 * d; ++j) v[j] = Rational(row[j], lcm);
    return unembed(f, v);
  };
  if (basis.size() == 1) {
    res.kind = LatticeResult::Kind::RankOne;
    res.e1 = to_complex(basis[0]);
    return res;
  }
  ExactComplex e1 = to_complex(basis[0]), e2 = to_complex(basis[1]);
  Scalar cr = cross(e1, e2);
  if (cr.sign() == 0) {
    res.kind = LatticeResult::Kind::Dense;  // rank 2 inside one real line
    return res;
  }
  res.kind = LatticeResult::Kind::Lattice;
  res.e1 = e1;
  res.e2 = e2;
  res.area = cr.abs();
  return res;
}

bool zspan_contains(const std::vector<ExactComplex>& generators, const ExactComplex& z) {
  if (z.is_zero()) return true;
  if (generators.empty()) return false;
  FieldPtr f = generators[0].field();
  std::vector<std::vector<Rational>> rv;
  for (const auto& g : generators) rv.push_back(embed(g));
  std::vector<Rational> target = embed(z);

  Integer lcm(1);
  auto fold = [&lcm](const Rational& r) {
    Integer g;
    mpz_lcm(g.get_mpz_t(), lcm.get_mpz_t(), r.den().get_mpz_t());
    lcm = g;
  };
  for (const auto& row : rv)
    for (const Rational& r : row) fold(r);
  for (const Rational& r : target) fold(r);

  std::vector<std::vector<Integer>> zm;
  for (const auto& row : rv) {
    std::vector<Integer> zr;
    for (const Rational& r : row) zr.push_back(r.num() * (lcm / r.den()));
    zm.push_back(std::move(zr));
  }
  std::vector<Integer> v;
  for (const Rational& r : target) v.push_back(r.num() * (lcm / r.den()));

  auto basis = hnf_rows(std::move(zm));
  // reduce v against the HNF basis; membership iff it reduces to zero
  for (const auto& row : basis) {
    size_t piv = 0;
    while (piv < row.size() && row[piv] == 0) ++piv;
    if (piv == row.size()) continue;
    if (v[piv] % row[piv] != 0) return false;
    Integer q = v[piv] / row[piv];
    for (size_t j = 0; j < row.size(); ++j) v[j] -= q * row[j];
  }
  for (const Integer& x : v)
    if (x != 0) return false;
  return true;
}

}  // namespace holonomy
