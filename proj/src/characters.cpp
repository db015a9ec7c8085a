#include "holonomy/characters.hpp"

#include <algorithm>
#include <numeric>

namespace holonomy {

void PeriodCharacter::validate() const {
  if (!field) throw std::invalid_argument("PeriodCharacter: null field");
  if (static_cast<int>(alpha.size()) != genus || static_cast<int>(beta.size()) != genus ||
      static_cast<int>(gamma.size()) != punctures)
    throw std::invalid_argument("PeriodCharacter: generator counts mismatch");
  ExactComplex sum = ExactComplex::zero(field);
  for (const ExactComplex& g : gamma) sum += g;
  if (!sum.is_zero())
    throw std::invalid_argument("PeriodCharacter: puncture values must sum to zero");
}

ExactComplex PeriodCharacter::handle_value(int k) const {
  return k % 2 == 0 ? alpha[k / 2] : beta[k / 2];
}

std::vector<ExactComplex> PeriodCharacter::all_values() const {
  std::vector<ExactComplex> v;
  for (int i = 0; i < genus; ++i) {
    v.push_back(alpha[i]);
    v.push_back(beta[i]);
  }
  for (const ExactComplex& g : gamma) v.push_back(g);
  return v;
}

PeriodCharacter PeriodCharacter::scaled(const ExactComplex& s) const {
  PeriodCharacter out = *this;
  for (auto* vec : {&out.alpha, &out.beta, &out.gamma})
    for (ExactComplex& v : *vec) v = v * s;
  return out;
}

PeriodCharacter trivial_character(FieldPtr f, int genus, int punctures) {
  PeriodCharacter chi;
  chi.genus = genus;
  chi.punctures = punctures;
  chi.field = f;
  chi.alpha.assign(genus, ExactComplex::zero(f));
  chi.beta.assign(genus, ExactComplex::zero(f));
  chi.gamma.assign(punctures, ExactComplex::zero(f));
  return chi;
}

Scalar volume(const PeriodCharacter& chi) {
  Scalar v = Scalar::zero(chi.field);
  for (int i = 0; i < chi.genus; ++i) v += cross(chi.alpha[i], chi.beta[i]);
  return v;
}

std::pair<PeriodCharacter, PeriodCharacter> split_character(const PeriodCharacter& chi) {
  PeriodCharacter g = chi, n = chi;
  g.punctures = 0;
  g.gamma.clear();
  n.genus = 0;
  n.alpha.clear();
  n.beta.clear();
  return {g, n};
}

CharacterClass classify_values(const std::vector<ExactComplex>& values) {
  CharacterClass out;
  const ExactComplex* first = nullptr;
  for (const ExactComplex& v : values)
    if (!v.is_zero()) {
      first = &v;
      break;
    }
  if (!first) {
    out.kind = CharacterClass::Kind::Trivial;
    return out;
  }
  ExactComplex c = *first;
  bool all_parallel = true, all_rational = true;
  std::vector<Rational> ratios;
  for (const ExactComplex& v : values) {
    if (v.is_zero()) {
      ratios.push_back(Rational(0));
      continue;
    }
    if (!parallel(c, v)) {
      all_parallel = false;
      break;
    }
    auto q = rational_ratio(c, v);
    if (!q) {
      all_rational = false;
      ratios.push_back(Rational(0));
    } else {
      ratios.push_back(*q);
    }
  }
  if (!all_parallel) {
    out.kind = CharacterClass::Kind::Generic;
    out.span = c;
    return out;
  }
  if (!all_rational) {
    out.kind = CharacterClass::Kind::RSpanOnly;
    out.span = c;
    return out;
  }
  // gcd of the rational multipliers: values = Z * (c * g) with content one
  Integer num_gcd(0), den_lcm(1);
  for (const Rational& q : ratios) {
    if (q.is_zero()) continue;
    Integer g;
    mpz_gcd(g.get_mpz_t(), num_gcd.get_mpz_t(), q.num().get_mpz_t());
    num_gcd = g;
    mpz_lcm(g.get_mpz_t(), den_lcm.get_mpz_t(), q.den().get_mpz_t());
    den_lcm = g;
  }
  Rational content(num_gcd, den_lcm);
  if (content.sign() < 0) content = -content;
  out.kind = CharacterClass::Kind::Rational;
  out.span = c * content;
  return out;
}

std::pair<CharacterClass, HandleProfile> classify_character(const PeriodCharacter& chi) {
  HandleProfile prof;
  for (int i = 0; i < chi.genus; ++i) {
    int s = cross(chi.alpha[i], chi.beta[i]).sign();
    prof.volume_signs.push_back(s);
    if (s < 0) ++prof.negative;
    else if (s == 0) ++prof.zero;
    else ++prof.positive;
  }
  return {classify_values(chi.all_values()), prof};
}

HauptVerdict haupt_decide(const PeriodCharacter& chi_g, int genus) {
  if (chi_g.punctures != 0)
    throw std::invalid_argument("haupt_decide: character must have no puncture values");
  HauptVerdict v;
  Scalar vol = volume(chi_g);
  if (genus == 1) {
    LatticeResult lat = lattice_detect(chi_g.all_values().empty()
                                           ? std::vector<ExactComplex>{ExactComplex::zero(
                                                 chi_g.field)}
                                           : chi_g.all_values());
    if (lat.kind != LatticeResult::Kind::Lattice) {
      v.reason = "NotALattice";
      return v;
    }
    if (vol.sign() <= 0) {
      v.reason = "NonPositiveVolume";
      return v;
    }
    v.realizable = true;
    return v;
  }
  if (vol.sign() <= 0) {
    v.reason = "NonPositiveVolume";
    return v;
  }
  LatticeResult lat = lattice_detect(chi_g.all_values());
  if (lat.kind == LatticeResult::Kind::Lattice) {
    Scalar bound = lat.area * Rational(2);
    if (vol < bound) {
      v.reason = "LatticeDeficient";
      return v;
    }
  }
  v.realizable = true;
  return v;
}

std::pair<PeriodCharacter, ExactComplex> normalize_integral(const PeriodCharacter& chi) {
  CharacterClass cls = classify_values(chi.all_values());
  if (cls.kind != CharacterClass::Kind::Rational) throw NotRational();
  const ExactComplex& c = cls.span;
  // every value is an integer multiple of c with content one already
  PeriodCharacter hat = chi;
  ExactComplex cinv =
      c * (Scalar::one(chi.field) / c.norm2());  // conj(c)/|c|^2 times ... see below
  // 1/c = conj(c)/|c|^2
  ExactComplex inv = c.conj() * (Scalar::one(chi.field) / c.norm2());
  auto to_int = [&](const ExactComplex& v) { return v * inv; };
  for (auto* vec : {&hat.alpha, &hat.beta, &hat.gamma})
    for (ExactComplex& v : *vec) v = to_int(v);
  (void)cinv;
  return {hat, c};
}

BasisChange BasisChange::identity(int genus) {
  BasisChange bc;
  bc.genus = genus;
  bc.matrix.assign(2 * genus, std::vector<Integer>(2 * genus, 0));
  for (int i = 0; i < 2 * genus; ++i) bc.matrix[i][i] = 1;
  return bc;
}

bool BasisChange::is_identity() const {
  for (int i = 0; i < 2 * genus; ++i)
    for (int j = 0; j < 2 * genus; ++j)
      if (matrix[i][j] != (i == j ? 1 : 0)) return false;
  return puncture_additions.empty();
}

void BasisChange::check_symplectic() const {
  const int n = 2 * genus;
  if (static_cast<int>(matrix.size()) != n) throw NotSymplectic();
  for (const auto& row : matrix)
    if (static_cast<int>(row.size()) != n) throw NotSymplectic();
  // J block-diagonal with blocks [[0,1],[-1,0]] on (a_i, b_i)
  auto J = [&](int i, int j) -> int {
    if (i / 2 != j / 2) return 0;
    if (i % 2 == 0 && j == i + 1) return 1;
    if (i % 2 == 1 && j == i - 1) return -1;
    return 0;
  };
  // check M^T J M = J
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Integer s(0);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += matrix[k][i] * Integer(J(k, l)) * matrix[l][j];
      if (s != J(i, j)) throw NotSymplectic();
    }
}

BasisChange BasisChange::compose_after(const BasisChange& first) const {
  // (this o first): apply `first`, then `this`.  Acting on characters,
  // chi o (this o first)_* values: v -> M_first (M_this v + adds_this) + ...
  // We track the transformation of the VALUE vector: new = M v (+ additions),
  // so composition multiplies matrices in application order.
  const int n = 2 * genus;
  BasisChange out;
  out.genus = genus;
  out.matrix.assign(n, std::vector<Integer>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Integer s(0);
      for (int k = 0; k < n; ++k) s += this->matrix[i][k] * first.matrix[k][j];
      out.matrix[i][j] = s;
    }
  // additions: new_v = M_this (M_first v + add_first) + add_this
  for (const auto& [k, vec] : first.puncture_additions) {
    for (int i = 0; i < n; ++i) {
      if (this->matrix[i][k] == 0) continue;
      auto& dst = out.puncture_additions[i];
      if (dst.empty()) dst.assign(vec.size(), Integer(0));
      for (size_t j = 0; j < vec.size(); ++j) dst[j] += this->matrix[i][k] * vec[j];
    }
  }
  for (const auto& [k, vec] : this->puncture_additions) {
    auto& dst = out.puncture_additions[k];
    if (dst.empty()) dst.assign(vec.size(), Integer(0));
    for (size_t j = 0; j < vec.size(); ++j) dst[j] += vec[j];
  }
  // prune zero rows
  for (auto it = out.puncture_additions.begin(); it != out.puncture_additions.end();) {
    bool all0 = true;
    for (const Integer& x : it->second) all0 &= x == 0;
    it = all0 ? out.puncture_additions.erase(it) : std::next(it);
  }
  return out;
}

PeriodCharacter apply_basis_change(const PeriodCharacter& chi, const BasisChange& bc) {
  if (bc.genus != chi.genus)
    throw std::invalid_argument("apply_basis_change: genus mismatch");
  bc.check_symplectic();
  PeriodCharacter out = chi;
  const int n = 2 * chi.genus;
  std::vector<ExactComplex> v;
  for (int k = 0; k < n; ++k) v.push_back(chi.handle_value(k));
  for (int k = 0; k < n; ++k) {
    ExactComplex s = ExactComplex::zero(chi.field);
    for (int l = 0; l < n; ++l)
      if (bc.matrix[k][l] != 0) s += v[l] * Rational(bc.matrix[k][l]);
    auto it = bc.puncture_additions.find(k);
    if (it != bc.puncture_additions.end()) {
      if (static_cast<int>(it->second.size()) != chi.punctures)
        throw std::invalid_argument("apply_basis_change: addition vector length");
      for (int j = 0; j < chi.punctures; ++j)
        if (it->second[j] != 0) s += chi.gamma[j] * Rational(it->second[j]);
    }
    if (k % 2 == 0) out.alpha[k / 2] = s;
    else out.beta[k / 2] = s;
  }
  return out;
}

Integer scalar_floor_div(const Scalar& a, const Scalar& b) {
  if (b.sign() <= 0) throw std::invalid_argument("scalar_floor_div: b must be positive");
  // find floor(a/b) by exact comparisons
  Integer lo, hi;
  if (a.sign() >= 0) {
    lo = 0;
    hi = 1;
    while ((b * Rational(hi) - a).sign() <= 0) hi *= 2;  // b*hi > a
  } else {
    hi = 0;
    lo = -1;
    while ((b * Rational(lo) - a).sign() > 0) lo *= 2;  // b*lo <= a
  }
  while (hi - lo > 1) {
    Integer sum = lo + hi;
    Integer mid;
    mpz_fdiv_q_ui(mid.get_mpz_t(), sum.get_mpz_t(), 2);
    if ((b * Rational(mid) - a).sign() <= 0) lo = mid;
    else hi = mid;
  }
  return lo;
}

namespace {

// Elementary symplectic moves as basis changes acting on the value vector.
BasisChange move_twist(int genus, int k, int l, const Integer& m) {
  // value[k] += m * value[l], compensated to stay symplectic:
  //   within a handle (l = partner of k): plain transvection is symplectic;
  //   across handles: value[partner(l)] -= m * value[partner(k)]
  BasisChange bc = BasisChange::identity(genus);
  auto partner = [](int x) { return x % 2 == 0 ? x + 1 : x - 1; };
  if (partner(k) == l) {
    bc.matrix[k][l] = m;
  } else {
    bc.matrix[k][l] = m;
    int pk = partner(k), pl = partner(l);
    // sign so that M^T J M = J: derived from the standard transvection pair
    int sk = k % 2 == 0 ? 1 : -1;
    int sl = l % 2 == 0 ? 1 : -1;
    bc.matrix[pl][pk] = -m * sk * sl;
  }
  bc.check_symplectic();
  return bc;
}

BasisChange move_rotate(int genus, int handle) {
  // (a, b) -> (-b, a) within the handle
  BasisChange bc = BasisChange::identity(genus);
  int a = 2 * handle, b = 2 * handle + 1;
  bc.matrix[a][a] = 0;
  bc.matrix[a][b] = -1;
  bc.matrix[b][a] = 1;
  bc.matrix[b][b] = 0;
  bc.check_symplectic();
  return bc;
}

BasisChange move_addition(int genus, int punctures, int k, int j, const Integer& m) {
  BasisChange bc = BasisChange::identity(genus);
  bc.puncture_additions[k] = std::vector<Integer>(punctures, Integer(0));
  bc.puncture_additions[k][j] = m;
  return bc;
}

struct Normalizer {
  PeriodCharacter chi;
  BasisChange total;

  explicit Normalizer(const PeriodCharacter& c)
      : chi(c), total(BasisChange::identity(c.genus)) {}

  void apply(const BasisChange& bc) {
    chi = apply_basis_change(chi, bc);
    total = bc.compose_after(total);
  }
  ExactComplex val(int k) const { return chi.handle_value(k); }
};

}  // namespace

std::pair<PeriodCharacter, BasisChange> mcg_normalize(const PeriodCharacter& chi,
                                                      McgMode mode,
                                                      const std::optional<Scalar>& epsilon) {
  chi.validate();
  Normalizer nz(chi);
  const int g = chi.genus;
  const FieldPtr f = chi.field;

  switch (mode) {
    case McgMode::NonzeroHandles: {
      // find a nonzero handle value
      int src = -1;
      for (int k = 0; k < 2 * g && src < 0; ++k)
        if (!nz.val(k).is_zero()) src = k;
      if (src < 0) throw HypothesisNotMet("nonzero_handles: genus part is trivial");
      for (int i = 0; i < g; ++i) {
        int a = 2 * i, b = 2 * i + 1;
        if (nz.val(a).is_zero() && nz.val(b).is_zero()) {
          // import the nonzero value from src's handle
          int use = !nz.val(src).is_zero() ? src : (src % 2 == 0 ? src + 1 : src - 1);
          nz.apply(move_twist(g, a, use, Integer(1)));
        }
        if (nz.val(a).is_zero()) nz.apply(move_twist(g, a, b, Integer(1)));
        if (nz.val(b).is_zero()) nz.apply(move_twist(g, b, a, Integer(1)));
        // the cross-handle compensation may have zeroed an earlier value;
        // re-fix below
      }
      for (int pass = 0; pass < 2 * g + 2; ++pass) {
        bool clean = true;
        for (int k = 0; k < 2 * g; ++k)
          if (nz.val(k).is_zero()) {
            clean = false;
            int p = k % 2 == 0 ? k + 1 : k - 1;
            if (!nz.val(p).is_zero()) {
              nz.apply(move_twist(g, k, p, Integer(1)));
            } else {
              int use = -1;
              for (int l = 0; l < 2 * g; ++l)
                if (l / 2 != k / 2 && !nz.val(l).is_zero()) use = l;
              if (use < 0) throw HypothesisNotMet("nonzero_handles: ran out of values");
              nz.apply(move_twist(g, k, use, Integer(1)));
            }
          }
        if (clean) break;
      }
      for (int k = 0; k < 2 * g; ++k)
        if (nz.val(k).is_zero())
          throw HypothesisNotMet("nonzero_handles: normalization failed");
      break;
    }
    case McgMode::NontrivialGenusPart: {
      if (g < 1) throw HypothesisNotMet("nontrivial_genus_part: needs genus");
      bool trivial = true;
      for (int k = 0; k < 2 * g; ++k) trivial &= nz.val(k).is_zero();
      if (!trivial) break;
      int j = -1;
      for (int t = 0; t < chi.punctures; ++t)
        if (!chi.gamma[t].is_zero()) j = t;
      if (j < 0) throw HypothesisNotMet("nontrivial_genus_part: puncture part trivial");
      nz.apply(move_addition(g, chi.punctures, 0, j, Integer(1)));
      break;
    }
    case McgMode::ShrinkIrrational: {
      if (!epsilon || epsilon->sign() <= 0)
        throw HypothesisNotMet("shrink_irrational: positive epsilon required");
      for (int i = 0; i < g; ++i) {
        int a = 2 * i, b = 2 * i + 1;
        ExactComplex va = nz.val(a), vb = nz.val(b);
        if (va.is_zero() || vb.is_zero()) continue;
        if (!va.im().is_zero() || !vb.im().is_zero()) continue;
        if (va.re().sign() <= 0 || vb.re().sign() <= 0) continue;
        if (rational_ratio(va, vb).has_value()) continue;
        // Euclidean descent until both values are below epsilon
        for (int rounds = 0; rounds < 4096; ++rounds) {
          Scalar ra = nz.val(a).re(), rb = nz.val(b).re();
          if (ra < *epsilon && rb < *epsilon) break;
          if (ra > rb) {
            Integer n = scalar_floor_div(ra, rb);
            if (n == 0) n = 1;
            nz.apply(move_twist(g, a, b, -n));
            if (nz.val(a).re().sign() <= 0) nz.apply(move_twist(g, a, b, Integer(1)));
          } else {
            Integer n = scalar_floor_div(rb, ra);
            if (n == 0) n = 1;
            nz.apply(move_twist(g, b, a, -n));
            if (nz.val(b).re().sign() <= 0) nz.apply(move_twist(g, b, a, Integer(1)));
          }
        }
        if (!(nz.val(a).re() < *epsilon) || !(nz.val(b).re() < *epsilon))
          throw HypothesisNotMet("shrink_irrational: descent did not converge");
      }
      break;
    }
    case McgMode::IrrationalRatios: {
      // all values real; make every handle pair positive with irrational ratio
      for (const ExactComplex& v : nz.chi.all_values())
        if (!v.im().is_zero())
          throw HypothesisNotMet("irrational_ratios: values must be real");
      // gamma values rational, some handle value irrational required
      for (const ExactComplex& v : nz.chi.gamma)
        if (!v.re().is_rational())
          throw HypothesisNotMet("irrational_ratios: puncture values must be rational");
      int src = -1;
      for (int k = 0; k < 2 * g; ++k)
        if (!nz.val(k).re().is_rational()) src = k;
      if (src < 0) throw HypothesisNotMet("irrational_ratios: no irrational handle value");
      // make every value irrational: add the src value across
      for (int k = 0; k < 2 * g; ++k) {
        if (k == src || !nz.val(k).re().is_rational()) continue;
        if (k / 2 == src / 2) {
          nz.apply(move_twist(g, k, src, Integer(1)));
        } else {
          nz.apply(move_twist(g, k, src, Integer(1)));
          if (nz.val(k).re().is_rational())  // compensation undid it: repeat
            nz.apply(move_twist(g, k, src, Integer(1)));
        }
        // the cross compensation may have turned src's partner rational; the
        // later passes fix any such pair
      }
      for (int pass = 0; pass < 2; ++pass)
        for (int k = 0; k < 2 * g; ++k)
          if (nz.val(k).re().is_rational()) {
            int use = -1;
            for (int l = 0; l < 2 * g; ++l)
              if (!nz.val(l).re().is_rational()) use = l;
            if (use < 0) throw HypothesisNotMet("irrational_ratios: lost irrationality");
            nz.apply(move_twist(g, k, use, Integer(1)));
          }
      // positivity
      for (int i = 0; i < g; ++i) {
        int a = 2 * i, b = 2 * i + 1;
        if (nz.val(a).re().sign() < 0 && nz.val(b).re().sign() < 0) {
          // (a, b) -> (-a, -b) = rotate twice
          nz.apply(move_rotate(g, i));
          nz.apply(move_rotate(g, i));
        }
        for (int rounds = 0; rounds < 64; ++rounds) {
          bool pa = nz.val(a).re().sign() > 0, pb = nz.val(b).re().sign() > 0;
          if (pa && pb) break;
          if (!pa && !pb) {
            nz.apply(move_rotate(g, i));
            nz.apply(move_rotate(g, i));
            continue;
          }
          // one positive, one negative: add the positive to the negative
          int neg = pa ? b : a, pos = pa ? a : b;
          Integer n = scalar_floor_div(-nz.val(neg).re(), nz.val(pos).re()) + 1;
          nz.apply(move_twist(g, neg, pos, n));
        }
        if (nz.val(a).re().sign() <= 0 || nz.val(b).re().sign() <= 0)
          throw HypothesisNotMet("irrational_ratios: positivity failed");
        // irrational ratio within the pair
        if (rational_ratio(nz.val(a), nz.val(b)).has_value()) {
          // add a rational gamma (or a rational combination) to a
          int j = -1;
          for (int t = 0; t < chi.punctures; ++t)
            if (!chi.gamma[t].is_zero()) j = t;
          if (j < 0) throw HypothesisNotMet("irrational_ratios: no rational shift exists");
          for (int m = 1; m <= 2; ++m) {
            nz.apply(move_addition(g, chi.punctures, a, j, Integer(1)));
            if (nz.val(a).re().sign() > 0 &&
                !rational_ratio(nz.val(a), nz.val(b)).has_value())
              break;
          }
          if (nz.val(a).re().sign() <= 0)
            nz.apply(move_twist(g, a, b, scalar_floor_div(-nz.val(a).re(), nz.val(b).re()) + 1));
          if (rational_ratio(nz.val(a), nz.val(b)).has_value())
            throw HypothesisNotMet("irrational_ratios: could not break the ratio");
        }
      }
      if (epsilon) {
        auto [shrunk, bc2] = mcg_normalize(nz.chi, McgMode::ShrinkIrrational, epsilon);
        nz.chi = shrunk;
        nz.total = bc2.compose_after(nz.total);
      }
      break;
    }
    case McgMode::HandlesToOne: {
      // chi surjective integral: all values integers with overall gcd 1
      std::vector<Integer> vals;
      bool ok = true;
      for (int k = 0; k < 2 * g; ++k) {
        const ExactComplex& v = nz.val(k);
        if (!v.im().is_zero() || !v.re().is_rational() ||
            !v.re().rational_value().is_integer())
          ok = false;
        else
          vals.push_back(v.re().rational_value().num());
      }
      for (const ExactComplex& v : chi.gamma)
        if (!v.im().is_zero() || !v.re().is_rational() || !v.re().rational_value().is_integer())
          ok = false;
      if (!ok) throw HypothesisNotMet("handles_to_one: character is not integral");
      Integer all_gcd(0);
      for (const Integer& x : vals) {
        Integer t;
        mpz_gcd(t.get_mpz_t(), all_gcd.get_mpz_t(), x.get_mpz_t());
        all_gcd = t;
      }
      for (const ExactComplex& v : chi.gamma) {
        Integer x = v.re().rational_value().num();
        Integer t;
        mpz_gcd(t.get_mpz_t(), all_gcd.get_mpz_t(), x.get_mpz_t());
        all_gcd = t;
      }
      if (all_gcd != 1) throw HypothesisNotMet("handles_to_one: character is not surjective");
      if (g == 0) break;

      auto ival = [&](int k) { return nz.val(k).re().rational_value().num(); };
      // step 1: make the handle vector primitive using a puncture loop
      {
        Integer d(0);
        for (int k = 0; k < 2 * g; ++k) {
          Integer t;
          mpz_gcd(t.get_mpz_t(), d.get_mpz_t(), ival(k).get_mpz_t());
          d = t;
        }
        if (d != 1) {
          int j = -1;
          for (int t = 0; t < chi.punctures; ++t) {
            Integer x = chi.gamma[t].re().rational_value().num();
            if (d == 0 ? x != 0 : x % d != 0) j = t;
          }
          if (j < 0) throw HypothesisNotMet("handles_to_one: cannot make the vector primitive");
          nz.apply(move_addition(g, chi.punctures, 0, j, Integer(1)));
        }
      }
      // step 2: per-handle euclid to (d_i, 0)
      for (int i = 0; i < g; ++i) {
        int a = 2 * i, b = 2 * i + 1;
        for (int rounds = 0; rounds < 4096; ++rounds) {
          Integer vb = ival(b);
          if (vb == 0) break;
          Integer va = ival(a);
          Integer q;
          mpz_fdiv_q(q.get_mpz_t(), va.get_mpz_t(), vb.get_mpz_t());
          nz.apply(move_twist(g, a, b, -q));
          nz.apply(move_rotate(g, i));  // (a, b) -> (-b, a)
        }
        if (ival(a) < 0) {
          nz.apply(move_rotate(g, i));
          nz.apply(move_rotate(g, i));
        }
      }
      // step 3: euclid across the alpha slots to concentrate gcd 1 in a1
      for (int rounds = 0; rounds < 4096; ++rounds) {
        // find the minimal positive alpha value
        int mi = -1;
        for (int i = 0; i < g; ++i) {
          Integer v = ival(2 * i);
          if (v == 0) continue;
          if (mi < 0 || v < ival(2 * mi)) mi = i;
        }
        if (mi < 0) throw HypothesisNotMet("handles_to_one: zero handle vector");
        bool done = true;
        for (int i = 0; i < g; ++i) {
          if (i == mi) continue;
          Integer v = ival(2 * i);
          if (v == 0) continue;
          Integer q;
          mpz_fdiv_q(q.get_mpz_t(), v.get_mpz_t(), ival(2 * mi).get_mpz_t());
          if (q != 0) nz.apply(move_twist(g, 2 * i, 2 * mi, -q));
          if (ival(2 * i) != 0) done = false;
        }
        if (done) {
          // move the gcd to handle 0 if needed
          if (mi != 0 && ival(0) == 0) {
            nz.apply(move_twist(g, 0, 2 * mi, Integer(1)));
            nz.apply(move_twist(g, 2 * mi, 0, -ival(2 * mi)));
          }
          break;
        }
      }
      if (ival(0) != 1) throw HypothesisNotMet("handles_to_one: reduction failed");
      // step 4: spread ones everywhere
      for (int i = 1; i < g; ++i)
        if (ival(2 * i) == 0) nz.apply(move_twist(g, 2 * i, 0, Integer(1)));
      for (int i = 0; i < g; ++i)
        if (ival(2 * i + 1) != 1)
          nz.apply(move_twist(g, 2 * i + 1, 2 * i, Integer(1) - ival(2 * i + 1)));
      for (int k = 0; k < 2 * g; ++k)
        if (ival(k) != 1) throw HypothesisNotMet("handles_to_one: did not reach all ones");
      break;
    }
  }

  // round trip: the returned change reproduces the returned character
  PeriodCharacter check = apply_basis_change(chi, nz.total);
  std::vector<ExactComplex> c1 = check.all_values(), c2 = nz.chi.all_values();
  for (size_t i = 0; i < c1.size(); ++i)
    if (!(c1[i] == c2[i])) throw std::logic_error("mcg_normalize: round trip failed");
  return {nz.chi, nz.total};
}

StratumDecision decide_stratum(const PeriodCharacter& chi, const std::vector<int>& kappa,
                               const std::vector<int>& nu) {
  chi.validate();
  const int g = chi.genus, n = chi.punctures;
  if (n < 1) throw BadStratum("at least one puncture required");
  if (static_cast<int>(nu.size()) != n)
    throw BadStratum("pole count must equal the puncture count");
  long sk = 0, sp = 0;
  for (int d : kappa) {
    if (d < 1) throw BadStratum("zero orders must be positive");
    sk += d;
  }
  for (int p : nu) {
    if (p < 1) throw BadStratum("pole orders must be positive");
    sp += p;
  }
  if (sk - sp != 2L * g - 2) throw BadStratum("degree identity fails");

  StratumDecision out;
  auto [cls, prof] = classify_character(chi);
  (void)prof;

  // necessary: punctures with zero holonomy can only carry poles of order >= 2
  int simple_poles = 0;
  for (int p : nu) simple_poles += p == 1 ? 1 : 0;
  int nonzero_gamma = 0;
  for (const ExactComplex& v : chi.gamma) nonzero_gamma += v.is_zero() ? 0 : 1;

  if (cls.kind == CharacterClass::Kind::Trivial) {
    if (simple_poles > 0) {
      out.rule = "PoleOrderOne";
      return out;
    }
    long bound = sp - n - 1;
    for (int d : kappa)
      if (d > bound) {
        out.rule = "OrderCondition";
        return out;
      }
    // single zero only on (g, n) = (0, 1); subsumed by the order condition
    // but kept as an explicit guard
    if (kappa.size() == 1 && !(g == 0 && n == 1)) {
      out.rule = "SingleZero";
      return out;
    }
    out.realizable = true;
    out.rule = "ThmB";
    return out;
  }

  if (simple_poles > nonzero_gamma) {
    out.rule = "SimplePoleResidue";
    return out;
  }

  bool all_simple = simple_poles == n;
  if (cls.kind == CharacterClass::Kind::Rational && all_simple) {
    // Theorem E via the integral normalization
    auto [hat, scale] = normalize_integral(chi);
    (void)scale;
    long d = 0;
    for (const ExactComplex& v : hat.gamma) {
      Rational r = v.re().rational_value();
      if (r.sign() > 0) d += r.num().get_si();
    }
    long maxd = 0;
    for (int dk : kappa) maxd = std::max(maxd, static_cast<long>(dk));
    if (d > maxd) {
      out.realizable = true;
      out.rule = "ThmE";
    } else {
      out.rule = "Gcomb0";
    }
    return out;
  }

  auto [chig, chin] = split_character(chi);
  CharacterClass cls_n = classify_values(chin.all_values());
  if (cls_n.kind == CharacterClass::Kind::Trivial) {
    out.realizable = true;
    out.rule = "ThmC_i";
    return out;
  }
  if (!all_simple) {
    out.realizable = true;
    out.rule = "ThmC_ii";
    return out;
  }
  if (cls_n.kind == CharacterClass::Kind::RSpanOnly ||
      cls_n.kind == CharacterClass::Kind::Generic) {
    out.realizable = true;
    out.rule = "ThmC_iii";
    return out;
  }
  // chi_n rational, all poles simple, chi not rational
  out.realizable = true;
  out.rule = "ThmC_iv";
  return out;
}

}  // namespace holonomy
