#include "holonomy/hurwitz.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

#include "holonomy/builder.hpp"
#include "holonomy/characters.hpp"

namespace holonomy {

void BranchDatum::normalize() {
  for (auto& p : partitions) std::sort(p.begin(), p.end(), std::greater<int>());
  std::sort(partitions.begin(), partitions.end());
}

DatumCheck validate_datum(const BranchDatum& d) {
  DatumCheck out;
  if (d.degree < 1) {
    out.ok = false;
    out.detail = "ArithmeticMismatch: degree must be positive";
    return out;
  }
  int ntilde = 0;
  for (const auto& part : d.partitions) {
    int sum = 0;
    bool nontrivial = false;
    for (int x : part) {
      if (x < 1) {
        out.ok = false;
        out.detail = "ArithmeticMismatch: partition entries must be positive";
        return out;
      }
      sum += x;
      nontrivial |= x > 1;
    }
    if (sum != d.degree) {
      out.ok = false;
      out.detail = "ArithmeticMismatch: partition does not sum to the degree";
      return out;
    }
    if (!nontrivial) {
      out.ok = false;
      out.detail = "ArithmeticMismatch: partition without a branched entry";
      return out;
    }
    ntilde += static_cast<int>(part.size());
  }
  out.total_preimages = ntilde;
  const int n = static_cast<int>(d.partitions.size());
  // chi(S_g) - ntilde = degree (chi(S^2) - n)
  if ((2 - 2 * d.source_genus) - ntilde != d.degree * (2 - n)) {
    out.ok = false;
    out.detail = "ArithmeticMismatch: Riemann-Hurwitz identity fails";
  }
  return out;
}

std::vector<int> cycle_type(const Perm& p) {
  std::vector<int> type;
  std::vector<bool> seen(p.size(), false);
  for (size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    size_t j = i;
    while (!seen[j]) {
      seen[j] = true;
      j = p[j];
      ++len;
    }
    type.push_back(len);
  }
  std::sort(type.begin(), type.end(), std::greater<int>());
  return type;
}

Perm compose(const Perm& a, const Perm& b) {
  Perm c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[b[i]];
  return c;
}

Perm inverse(const Perm& p) {
  Perm q(p.size());
  for (size_t i = 0; i < p.size(); ++i) q[p[i]] = static_cast<int>(i);
  return q;
}

bool is_transitive(const std::vector<Perm>& gens, int degree) {
  if (degree <= 1) return true;
  std::vector<int> comp(degree, -1);
  std::vector<int> stack{0};
  comp[0] = 0;
  int seen = 1;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (const Perm& g : gens) {
      for (int y : {g[x], inverse(g)[x]}) {
        if (comp[y] < 0) {
          comp[y] = 0;
          stack.push_back(y);
          ++seen;
        }
      }
    }
  }
  return seen == degree;
}

Perm minimal_representative(std::vector<int> type, int degree) {
  // ascending cycle lengths laid out on consecutive blocks
  std::sort(type.begin(), type.end());
  Perm p(degree);
  int at = 0;
  for (int len : type) {
    for (int i = 0; i < len; ++i) p[at + i] = at + (i + 1) % len;
    at += len;
  }
  return p;
}

namespace {

// all permutations of the given cycle type, ascending lexicographic order
std::vector<Perm> perms_of_type(const std::vector<int>& type, int degree) {
  std::vector<int> sorted = type;
  std::sort(sorted.begin(), sorted.end(), std::greater<int>());
  Perm p(degree);
  std::iota(p.begin(), p.end(), 0);
  std::vector<Perm> out;
  do {
    if (cycle_type(p) == sorted) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace

std::optional<MonodromyTuple> brute_force_realize(const BranchDatum& d, int degree_bound) {
  DatumCheck check = validate_datum(d);
  if (!check.ok) return std::nullopt;
  if (d.degree > degree_bound) throw DegreeTooLarge();
  const int deg = d.degree;
  const int n = static_cast<int>(d.partitions.size());
  if (n == 0) {
    // unbranched cover of the sphere: only the identity of degree 1
    if (deg == 1 && d.source_genus == 0) return MonodromyTuple{{}};
    return std::nullopt;
  }
  if (deg == 1) return std::nullopt;  // partitions need an entry > 1

  std::vector<Perm> tuple(n);
  tuple[0] = minimal_representative(d.partitions[0], deg);
  std::vector<int> last_type = d.partitions[n - 1];
  std::sort(last_type.begin(), last_type.end(), std::greater<int>());

  if (n == 1) {
    // product must be the identity: impossible for a nontrivial partition
    return std::nullopt;
  }

  // cache the candidate lists per cycle type
  std::map<std::vector<int>, std::vector<Perm>> pool;
  for (int i = 1; i + 1 < n; ++i) {
    std::vector<int> t = d.partitions[i];
    std::sort(t.begin(), t.end(), std::greater<int>());
    if (!pool.count(t)) pool[t] = perms_of_type(t, deg);
  }

  std::optional<MonodromyTuple> best;
  // depth-first over positions 1..n-2; the last permutation is forced
  std::vector<Perm> prefix{tuple[0]};  // running products: prefix.back() = s1...sk
  std::vector<size_t> idx(std::max(0, n - 2), 0);

  std::function<bool(int)> dfs = [&](int pos) -> bool {
    if (pos == n - 1) {
      Perm forced = inverse(prefix.back());
      std::vector<int> t = cycle_type(forced);
      if (t != last_type) return false;
      std::vector<Perm> all(tuple.begin(), tuple.begin() + (n - 1));
      all.push_back(forced);
      if (!is_transitive(all, deg)) return false;
      tuple[n - 1] = forced;
      best = MonodromyTuple{tuple};
      return true;
    }
    std::vector<int> t = d.partitions[pos];
    std::sort(t.begin(), t.end(), std::greater<int>());
    for (const Perm& cand : pool[t]) {
      tuple[pos] = cand;
      prefix.push_back(compose(prefix.back(), cand));
      bool found = dfs(pos + 1);
      prefix.pop_back();
      if (found) return true;
    }
    return false;
  };
  if (dfs(1)) return best;
  return std::nullopt;
}

SurfaceDatum datum_from_surface(const MarkedSurface& ms) {
  AuditResult audit = audit_surface(ms.complex);
  if (!audit.complete) throw NotAllSimple();
  SurfaceDatum out;
  FieldPtr f = ms.complex.pieces[0].chain[0].field();
  for (const EndInfo& e : audit.ends) {
    if (e.pole_order != 1) throw NotAllSimple();
    const ExactComplex& r = e.residue_period;
    if (!r.im().is_zero() || !r.re().is_rational() || !r.re().rational_value().is_integer())
      throw NotIntegral();
    long v = r.re().rational_value().num().get_si();
    if (v > 0) out.lambda.push_back(static_cast<int>(v));
    else if (v < 0) out.mu.push_back(static_cast<int>(-v));
    else throw NotIntegral();  // zero residue on a cylinder cannot happen
  }
  std::sort(out.lambda.begin(), out.lambda.end(), std::greater<int>());
  std::sort(out.mu.begin(), out.mu.end(), std::greater<int>());
  long d = 0;
  for (int x : out.lambda) d += x;
  long dsum2 = 0;
  for (int x : out.mu) dsum2 += x;
  if (d != dsum2 || d == 0) throw NotIntegral();

  // develop the pieces: offsets modulo the integer lattice
  const auto& c = ms.complex;
  std::vector<ExactComplex> offset(c.pieces.size(), ExactComplex::zero(f));
  std::vector<bool> seen(c.pieces.size(), false);
  std::vector<int> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    int p = stack.back();
    stack.pop_back();
    for (const Gluing& g : c.gluings) {
      int q = -1;
      ExactComplex shift = ExactComplex::zero(f);
      if (g.a.piece == p) {
        q = g.b.piece;
        // crossing a->b: local_b = local_a + t, so dev offset_b = offset_a - t
        shift = offset[p] - g.translation;
      } else if (g.b.piece == p) {
        q = g.a.piece;
        shift = offset[p] + g.translation;
      } else {
        continue;
      }
      if (!seen[q]) {
        seen[q] = true;
        offset[q] = shift;
        stack.push_back(q);
      } else {
        ExactComplex diff = offset[q] - shift;
        if (!diff.im().is_zero() || !diff.re().is_rational() ||
            !diff.re().rational_value().is_integer())
          throw NotIntegral();
      }
    }
  }

  // group zeros by developed image modulo Z
  std::map<std::string, std::vector<int>> groups;
  auto key_of = [&](const ExactComplex& z) {
    Scalar re = z.re();
    Integer fl = scalar_floor_div(re, Scalar::one(f));
    Scalar frac = re - Scalar::of(f, Rational(fl));
    std::string key;
    for (const Rational& r : frac.coeffs()) key += r.str() + ",";
    key += ";";
    for (const Rational& r : z.im().coeffs()) key += r.str() + ",";
    return key;
  };
  for (const VertexClassInfo& vc : audit.vertex_classes) {
    if (vc.order() < 1) continue;
    const CornerRef& cr = vc.corners.front();
    ExactComplex pos = c.pieces[cr.piece].chain[cr.corner] - offset[cr.piece];
    groups[key_of(pos)].push_back(vc.order() + 1);
  }

  out.datum.source_genus = audit.genus;
  out.datum.degree = static_cast<int>(d);
  auto all_ones = [](const std::vector<int>& v) {
    for (int x : v)
      if (x != 1) return false;
    return true;
  };
  if (!all_ones(out.lambda)) out.datum.partitions.push_back(out.lambda);
  if (!all_ones(out.mu)) out.datum.partitions.push_back(out.mu);
  for (auto& [key, entries] : groups) {
    std::vector<int> part = entries;
    int sum = 0;
    for (int x : part) sum += x;
    if (sum > d) throw std::logic_error("datum_from_surface: branch value exceeds the degree");
    for (long i = sum; i < d; ++i) part.push_back(1);
    std::sort(part.begin(), part.end(), std::greater<int>());
    out.datum.partitions.push_back(part);
  }
  out.datum.normalize();
  return out;
}

MarkedSurface surface_from_monodromy(const MonodromyTuple& t, int degree, int plus_index,
                                     int minus_index, const FieldPtr& f) {
  const int n = static_cast<int>(t.permutations.size());
  for (const Perm& p : t.permutations)
    if (static_cast<int>(p.size()) != degree) throw InvalidTuple("permutation size mismatch");
  {
    Perm prod(degree);
    std::iota(prod.begin(), prod.end(), 0);
    for (const Perm& p : t.permutations) prod = compose(prod, p);
    for (int i = 0; i < degree; ++i)
      if (prod[i] != i) throw InvalidTuple("product is not the identity");
    if (!is_transitive(t.permutations, degree) && degree > 1)
      throw InvalidTuple("action is not transitive");
  }
  if (plus_index >= n || minus_index >= n)
    throw InvalidTuple("special fiber index out of range");

  // branch values on the cylinder away from the ends: every permutation
  // except the designated plus/minus fibers
  std::vector<Perm> rays;  // monodromy crossing the vertical ray of value j
  for (int i = 0; i < n; ++i)
    if (i != plus_index && i != minus_index) rays.push_back(t.permutations[i]);
  const int m = static_cast<int>(rays.size());

  // the seam monodromy: sigma_minus when designated, else the product of the
  // interior values must make the minus end unbranched
  Perm seam;
  if (minus_index >= 0) {
    seam = t.permutations[minus_index];
  } else {
    seam.assign(degree, 0);
    std::iota(seam.begin(), seam.end(), 0);
  }

  // positions x_j = j/(m+1) for the interior branch values
  SurfaceBuilder b(f);
  // per sheet: bottom half-strip + (m+1) top half-strips
  std::vector<int> bottom(degree);
  std::vector<std::vector<int>> top(degree, std::vector<int>(m + 1));
  auto X = [&](int num) { return ExactComplex::of(f, Rational(num, m + 1), Rational(0)); };
  for (int s = 0; s < degree; ++s) {
    bottom[s] = b.add_piece(
        make_half_strip({ExactComplex::of(f, Rational(1), Rational(0)),
                         ExactComplex::of(f, Rational(0), Rational(0))},
                        ExactComplex::of(f, Rational(0), Rational(-1))));
    for (int j = 0; j <= m; ++j)
      top[s][j] = b.add_piece(make_half_strip({X(j), X(j + 1)},
                                              ExactComplex::of(f, Rational(0), Rational(1))));
  }
  // subdivide each bottom base at the interior x positions and glue to tops
  for (int s = 0; s < degree; ++s) {
    // bottom chain is [1, 0]: the base edge is index 1
    SurfaceBuilder::EdgeId base = b.boundary_edge(bottom[s], 1);
    // split at x_m, ..., x_1 (descending so indices stay valid)
    std::vector<SurfaceBuilder::EdgeId> parts;
    SurfaceBuilder::EdgeId cur = base;
    for (int j = m; j >= 1; --j) {
      auto [first, second] = b.split_edge(cur, X(j));
      parts.push_back(first);  // [1 .. x_j] piecewise: first = toward 1
      cur = second;
    }
    parts.push_back(cur);
    // parts are ordered from the x=1 side toward x=0: parts[i] spans
    // [x_{m-i}, x_{m-i+1}]
    for (int j = 0; j <= m; ++j) {
      SurfaceBuilder::EdgeId bpart = parts[m - j];
      // top strip j base edge: index 1
      b.glue_auto(b.boundary_edge(top[s][j], 1), bpart);
    }
  }
  // interior rays: right wall of top[s][j-1] ~ left wall of top[rays_j(s)][j]
  for (int j = 1; j <= m; ++j) {
    const Perm& rho = rays[j - 1];
    for (int s = 0; s < degree; ++s) {
      int s2 = rho[s];
      // top strip chains run [X(j-1), X(j)]: edge 0 = RayIn at X(j-1) (left
      // wall), edge 2 = RayOut at X(j) (right wall)
      b.glue_auto(b.boundary_edge(top[s][j - 1], 2), b.boundary_edge(top[s2][j], 0));
    }
  }
  // seam x=1 -> x=0 of sheet seam(s): top walls and bottom walls
  for (int s = 0; s < degree; ++s) {
    int s2 = seam[s];
    b.glue_auto(b.boundary_edge(top[s][m], 2), b.boundary_edge(top[s2][0], 0));
    // bottom strip walls: RayIn at x=1 is still position 0; the RayOut at
    // x=0 sits at the last position (the base splits shifted the middle)
    b.glue_auto(b.boundary_edge(bottom[s], 0),
                b.boundary_edge(bottom[s2], b.boundary_size(bottom[s2]) - 1));
  }
  b.log("surface_from_monodromy degree=" + std::to_string(degree));
  MarkedSurface out = b.finalize();
  // gamma markings and end labels from the audit, positive ends first
  AuditResult audit = audit_surface(out.complex);
  int label = 0;
  out.end_labels.assign(audit.ends.size(), -1);
  for (int pass = 0; pass < 2; ++pass)
    for (size_t e = 0; e < audit.ends.size(); ++e) {
      int sgn = audit.ends[e].residue_period.re().sign();
      if ((pass == 0 && sgn > 0) || (pass == 1 && sgn < 0)) {
        out.marking["g" + std::to_string(label + 1)] = audit.ends[e].loop;
        out.end_labels[label] = static_cast<int>(e);
        ++label;
      }
    }
  return out;
}

}  // namespace holonomy
