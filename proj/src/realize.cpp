#include "holonomy/realize.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace holonomy {

namespace {

ExactComplex CC(const FieldPtr& f, const Rational& re, const Rational& im) {
  return ExactComplex::of(f, re, im);
}

// integer bound with |re(z)|, |im(z)| <= bound
Integer coord_bound(const ExactComplex& z) {
  const FieldPtr& f = z.field();
  Scalar one = Scalar::one(f);
  Integer b = scalar_floor_div(z.re().abs(), one) + scalar_floor_div(z.im().abs(), one) + 1;
  return b;
}

// argument-order comparator for nonzero values: angles ascending in [0, 2pi),
// ties by squared modulus, then by original index
bool arg_less(const ExactComplex& v, const ExactComplex& w, int iv, int iw) {
  auto half = [](const ExactComplex& z) {
    int s = z.im().sign();
    if (s > 0) return 0;
    if (s < 0) return 1;
    return z.re().sign() > 0 ? 0 : 1;
  };
  int hv = half(v), hw = half(w);
  if (hv != hw) return hv < hw;
  int cr = cross(v, w).sign();
  if (cr != 0) return cr > 0;
  if (dot(v, w).sign() > 0) {
    int cmp = (v.norm2() - w.norm2()).sign();
    if (cmp != 0) return cmp < 0;
    return iv < iw;
  }
  // opposite directions within one half cannot happen (half() separates them)
  return iv < iw;
}

// find a corner whose chain position equals pos and whose class has the
// given cone half-turns (pass -1 to match any)
CornerRef find_corner_at(const MarkedSurface& ms, const ExactComplex& pos, int halfturns) {
  SurfaceBuilder b(ms);
  for (size_t pi = 0; pi < ms.complex.pieces.size(); ++pi) {
    const Piece& p = ms.complex.pieces[pi];
    for (int ci = 0; ci < static_cast<int>(p.chain.size()); ++ci) {
      if (!(p.chain[ci] == pos)) continue;
      if (halfturns >= 0 &&
          b.class_halfturns({static_cast<int>(pi), ci}) != halfturns)
        continue;
      return {static_cast<int>(pi), ci};
    }
  }
  throw RealizeError("find_corner_at: no corner at the requested position");
}

// Assigns each puncture label to an end: infinity ends are matched to
// punctures whose value equals the end residue up to sign (the loop is
// reversed afterwards when the sign is opposite); removable ends take the
// zero-valued punctures in order.
void label_ends_by_residue(MarkedSurface& ms, const PeriodCharacter& chi) {
  AuditResult audit = audit_surface(ms.complex);
  const int n = chi.punctures;
  ms.end_labels.assign(n, -1);
  std::vector<bool> end_used(audit.ends.size(), false);
  // nonzero punctures onto infinity ends by residue
  for (int j = 0; j < n; ++j) {
    if (chi.gamma[j].is_zero()) continue;
    for (size_t e = 0; e < audit.ends.size(); ++e) {
      if (end_used[e] || !audit.ends[e].at_infinity) continue;
      const ExactComplex& r = audit.ends[e].residue_period;
      if (r == chi.gamma[j] || -r == chi.gamma[j]) {
        end_used[e] = true;
        ms.end_labels[j] = static_cast<int>(e);
        ms.marking["g" + std::to_string(j + 1)] = audit.ends[e].loop;
        break;
      }
    }
    if (ms.end_labels[j] < 0)
      throw RealizeError("label_ends: no end carries the required residue");
  }
  // zero punctures: removable ends first, then leftover infinity ends with
  // zero residue (completed punctures)
  for (int j = 0; j < n; ++j) {
    if (!chi.gamma[j].is_zero()) continue;
    for (size_t e = 0; e < audit.ends.size(); ++e) {
      if (end_used[e]) continue;
      if (!audit.ends[e].at_infinity || audit.ends[e].residue_period.is_zero()) {
        end_used[e] = true;
        ms.end_labels[j] = static_cast<int>(e);
        ms.marking["g" + std::to_string(j + 1)] = audit.ends[e].loop;
        break;
      }
    }
    if (ms.end_labels[j] < 0)
      throw RealizeError("label_ends: no end left for a trivial puncture");
  }
}

// deterministic host piece for a fresh anchor point (free space may be seen
// by several sheets; any of them is a valid fresh spot)
int find_host(const MarkedSurface& ms, const ExactComplex& p) {
  for (size_t pi = 0; pi < ms.complex.pieces.size(); ++pi)
    if (locate_point(ms.complex.pieces[pi], p) == Region::Interior)
      return static_cast<int>(pi);
  throw RealizeError("find_host: no piece contains the anchor point");
}

// rebuild end labels by matching each puncture loop's gluing set against the
// end cycles
void relabel_ends_from_markings(MarkedSurface& ms, int punctures) {
  AuditResult audit = audit_surface(ms.complex);
  ms.end_labels.assign(punctures, -1);
  for (int j = 0; j < punctures; ++j) {
    auto it = ms.marking.find("g" + std::to_string(j + 1));
    if (it == ms.marking.end()) continue;
    std::set<int> used;
    for (const Crossing& x : it->second) used.insert(x.gluing);
    for (size_t e = 0; e < audit.ends.size(); ++e) {
      std::set<int> cyc;
      if (audit.ends[e].at_infinity)
        cyc.insert(audit.ends[e].ray_gluings.begin(), audit.ends[e].ray_gluings.end());
      else
        for (const Crossing& x : audit.ends[e].loop) cyc.insert(x.gluing);
      if (cyc == used) {
        ms.end_labels[j] = static_cast<int>(e);
        break;
      }
    }
  }
}

}  // namespace

RealizationCheck verify_realization(const MarkedSurface& ms, const PeriodCharacter& chi,
                                    const std::optional<StratumSpec>& stratum) {
  RealizationCheck out;
  chi.validate();
  auto expect = [&](const std::string& name, const ExactComplex& want) {
    auto it = ms.marking.find(name);
    if (it == ms.marking.end()) {
      out.pass = false;
      out.failures.push_back("MissingMarking(" + name + ")");
      return;
    }
    ExactComplex got = compute_holonomy(ms.complex, it->second);
    if (!(got == want)) {
      out.pass = false;
      out.failures.push_back("CharacterMismatch(" + name + ")");
    }
  };
  for (int i = 0; i < chi.genus; ++i) {
    expect("a" + std::to_string(i + 1), chi.alpha[i]);
    expect("b" + std::to_string(i + 1), chi.beta[i]);
  }
  ExactComplex sum = ExactComplex::zero(chi.field);
  for (int j = 0; j < chi.punctures; ++j) {
    expect("g" + std::to_string(j + 1), chi.gamma[j]);
    auto it = ms.marking.find("g" + std::to_string(j + 1));
    if (it != ms.marking.end()) sum += compute_holonomy(ms.complex, it->second);
  }
  if (!sum.is_zero()) {
    out.pass = false;
    out.failures.push_back("PunctureSumNonzero");
  }
  if (stratum) {
    AuditResult audit = audit_surface(ms.complex);
    StratumSpec got;
    got.zero_orders = audit.zero_orders();
    got.pole_orders = audit.pole_orders();
    StratumSpec want = *stratum;
    want.normalize();
    if (!audit.complete || !(got == want)) {
      out.pass = false;
      out.failures.push_back("StratumMismatch");
    }
  }
  return out;
}

MarkedSurface realize_sphere(const PeriodCharacter& chi_n) {
  chi_n.validate();
  if (chi_n.genus != 0) throw RealizeError("realize_sphere: genus must be zero");
  const int n = chi_n.punctures;
  if (n < 1) throw RealizeError("realize_sphere: at least one puncture");
  const FieldPtr f = chi_n.field;

  std::vector<int> J;
  for (int j = 0; j < n; ++j)
    if (!chi_n.gamma[j].is_zero()) J.push_back(j);
  const int m = static_cast<int>(J.size());
  if (m == 1) throw RealizeError("realize_sphere: puncture values cannot sum to zero");

  SurfaceBuilder b(f);
  std::vector<int> punctured_labels;

  if (m == 0) {
    // the plane with n-1 punctured regular points; puncture n is at infinity
    int up = b.add_piece(make_half_plane({CC(f, 0, 0)}, CC(f, 1, 0)));
    int dn = b.add_piece(make_half_plane({CC(f, 0, 0)}, CC(f, -1, 0)));
    b.glue_auto(b.boundary_edge(dn, 1), b.boundary_edge(up, 0));
    b.glue_auto(b.boundary_edge(up, 1), b.boundary_edge(dn, 0));
    for (int j = 0; j + 1 < n; ++j) {
      ExactComplex p = CC(f, Rational(j + 1), Rational(2 * j + 3, 3));
      auto slit = b.slit_segment(SurfaceBuilder::at_point(up, p), CC(f, Rational(1, 4), 0));
      b.close_slit(slit);
      // the slit start is now a regular vertex: puncture it
      for (SurfaceBuilder::PieceId pp : b.alive_pieces()) {
        const Piece& g = b.piece(pp);
        bool found = false;
        for (int ci = 0; ci < static_cast<int>(g.chain.size()); ++ci)
          if (g.chain[ci] == p) {
            b.puncture(pp, ci);
            found = true;
            break;
          }
        if (found) break;
      }
      punctured_labels.push_back(j);
    }
  } else {
    // sort the nonzero values cyclically by argument
    std::vector<int> order = J;
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      return arg_less(chi_n.gamma[x], chi_n.gamma[y], x, y);
    });
    bool degenerate = true;
    for (size_t i = 1; i < order.size() && degenerate; ++i)
      degenerate = parallel(chi_n.gamma[order[0]], chi_n.gamma[order[i]]);

    std::vector<int> strip_of(n, -1);
    if (m == 2 && degenerate) {
      // plain cylinder
      const ExactComplex w = chi_n.gamma[J[0]];
      ExactComplex upv = w.rot90();
      int upS = b.add_piece(make_half_strip({CC(f, 0, 0), w}, upv));
      int dnS = b.add_piece(make_half_strip({w, CC(f, 0, 0)}, -upv));
      b.glue_auto(b.boundary_edge(upS, 1), b.boundary_edge(dnS, 1));
      b.glue_auto(b.boundary_edge(upS, 2), b.boundary_edge(upS, 0));
      b.glue_auto(b.boundary_edge(dnS, 2), b.boundary_edge(dnS, 0));
      strip_of[J[0]] = upS;
      strip_of[J[1]] = dnS;
    } else if (!degenerate) {
      // convex polygon with outward half-strips
      std::vector<ExactComplex> chain;
      ExactComplex at = ExactComplex::zero(f);
      for (int j : order) {
        chain.push_back(at);
        at += chi_n.gamma[j];
      }
      int poly = b.add_piece(make_polygon(chain));
      for (int s = 0; s < m; ++s) {
        int j = order[s];
        ExactComplex e = chi_n.gamma[j];
        ExactComplex zj = chain[s];
        ExactComplex d = -(e.rot90());  // outward
        int strip = b.add_piece(make_half_strip({zj + e, zj}, d));
        b.glue_auto(b.boundary_edge(poly, s), b.boundary_edge(strip, 1));
        b.glue_auto(b.boundary_edge(strip, 2), b.boundary_edge(strip, 0));
        strip_of[j] = strip;
      }
    } else {
      // degenerate: all values on one line; parallelogram with strips on both
      // sides.  positives in sorted order first.
      std::vector<int> pos, neg;
      const ExactComplex dirc = chi_n.gamma[order[0]];
      for (int j : order)
        (dot(dirc, chi_n.gamma[j]).sign() > 0 ? pos : neg).push_back(j);
      ExactComplex top_start = ExactComplex::zero(f);
      ExactComplex top_end = top_start;
      for (int j : pos) top_end += chi_n.gamma[j];
      ExactComplex off = -(top_end - top_start).rot90();  // downward offset
      // parallelogram with subdivided top and bottom sides
      std::vector<ExactComplex> chain;
      chain.push_back(top_start + off);
      {
        ExactComplex at = top_start + off;  // bottom left
        // bottom side carries the negative values from right to left... walk
        // left to right: from bottom-left, the reversed negative chain
        std::vector<ExactComplex> bots;
        ExactComplex cur = top_end + off;
        bots.push_back(cur);
        for (int j : neg) {
          cur += chi_n.gamma[j];
          bots.push_back(cur);
        }
        // bots runs from bottom-right back to bottom-left
        std::reverse(bots.begin(), bots.end());
        // chain CCW: bottom-left .. bottom-right, top-right .. top-left
        chain.clear();
        for (const ExactComplex& z : bots) chain.push_back(z);
        ExactComplex at2 = top_end;
        chain.push_back(at2);
        for (int i = static_cast<int>(pos.size()) - 1; i >= 1; --i) {
          at2 -= chi_n.gamma[pos[i]];
          chain.push_back(at2);
        }
        chain.push_back(top_start);
        (void)at;
      }
      int poly = b.add_piece(make_polygon(chain));
      // vertical sides glued to each other: the edges closing the chain
      int nb = static_cast<int>(neg.size());
      int np = static_cast<int>(pos.size());
      // edges: 0..nb-1 bottom segments, nb = right vertical, nb+1..nb+np top
      // segments, nb+np+1 = left vertical (cyclic)
      b.glue_auto(b.boundary_edge(poly, nb), b.boundary_edge(poly, nb + np + 1));
      // top strips (positives): top edge s covers pos[np-1-s]... derive:
      auto attach_strip = [&](int edge_idx, int j) {
        Edge be = b.piece(poly).edge(edge_idx);
        ExactComplex v = be.b - be.a;
        int strip = b.add_piece(make_half_strip({be.b, be.a}, -(v.rot90())));
        b.glue_auto(b.boundary_edge(poly, edge_idx), b.boundary_edge(strip, 1));
        b.glue_auto(b.boundary_edge(strip, 2), b.boundary_edge(strip, 0));
        strip_of[j] = strip;
      };
      // top edges run right to left and carry the positives in reverse
      for (int s = 0; s < np; ++s) attach_strip(nb + 1 + s, pos[np - 1 - s]);
      // bottom edges run left to right and carry the negatives in reverse
      for (int s = 0; s < nb; ++s) attach_strip(s, neg[nb - 1 - s]);
    }
    // punctured regular points for the trivial values
    int host = strip_of[J[0]];
    int count = 0;
    for (int j = 0; j < n; ++j) {
      if (strip_of[j] >= 0) continue;
      const Piece host_geom = b.piece(host);
      ExactComplex base =
          (host_geom.chain.front() + host_geom.chain.back()) * Rational(1, 2);
      ExactComplex across = host_geom.chain.back() - host_geom.chain.front();
      ExactComplex p = base + host_geom.ray_dir * Rational(2 + 3 * count) +
                       across * Rational(count + 1, 5 * (count + 2));
      ExactComplex vec = host_geom.ray_dir * Rational(1, 4);
      auto slit = b.slit_segment(SurfaceBuilder::at_point(host, p), vec);
      b.close_slit(slit);
      for (SurfaceBuilder::PieceId pp : b.alive_pieces()) {
        const Piece& g = b.piece(pp);
        bool found = false;
        for (int ci = 0; ci < static_cast<int>(g.chain.size()); ++ci)
          if (g.chain[ci] == p) {
            b.puncture(pp, ci);
            found = true;
            break;
          }
        if (found) break;
      }
      punctured_labels.push_back(j);
      ++count;
    }
  }
  b.log("realize_sphere n=" + std::to_string(n));
  MarkedSurface ms = b.finalize();
  // puncture loops for the punctured regular points (removable ends)
  {
    AuditResult audit = audit_surface(ms.complex);
    int k = 0;
    for (size_t e = 0; e < audit.ends.size(); ++e) {
      if (audit.ends[e].at_infinity) continue;
      int label = punctured_labels.at(k++);
      ms.marking["g" + std::to_string(label + 1)] = audit.ends[e].loop;
    }
  }
  // infinity ends by residue (removable ends already marked keep their loops)
  {
    AuditResult audit = audit_surface(ms.complex);
    std::vector<bool> end_used(audit.ends.size(), false);
    ms.end_labels.assign(n, -1);
    for (int j = 0; j < n; ++j) {
      if (chi_n.gamma[j].is_zero()) continue;
      for (size_t e = 0; e < audit.ends.size(); ++e) {
        if (end_used[e] || !audit.ends[e].at_infinity) continue;
        const ExactComplex& r = audit.ends[e].residue_period;
        if (r == chi_n.gamma[j] || -r == chi_n.gamma[j]) {
          end_used[e] = true;
          ms.end_labels[j] = static_cast<int>(e);
          ms.marking["g" + std::to_string(j + 1)] = audit.ends[e].loop;
          break;
        }
      }
      if (ms.end_labels[j] < 0)
        throw RealizeError("realize_sphere: no end carries the required residue");
    }
    for (int j = 0; j < n; ++j) {
      if (!chi_n.gamma[j].is_zero()) continue;
      if (ms.marking.count("g" + std::to_string(j + 1))) continue;
      for (size_t e = 0; e < audit.ends.size(); ++e) {
        if (end_used[e] || !audit.ends[e].at_infinity) continue;
        if (!audit.ends[e].residue_period.is_zero()) continue;
        end_used[e] = true;
        ms.end_labels[j] = static_cast<int>(e);
        ms.marking["g" + std::to_string(j + 1)] = audit.ends[e].loop;
        break;
      }
    }
  }
  // gamma orientation: flip loops whose holonomy came out negated
  for (int j = 0; j < n; ++j) {
    std::string name = "g" + std::to_string(j + 1);
    auto it = ms.marking.find(name);
    if (it == ms.marking.end()) throw RealizeError("realize_sphere: unmarked puncture");
    ExactComplex got = compute_holonomy(ms.complex, it->second);
    if (got == chi_n.gamma[j]) continue;
    if (-got == chi_n.gamma[j]) {
      std::reverse(it->second.begin(), it->second.end());
      for (Crossing& x : it->second) x.sign = -x.sign;
    } else {
      throw RealizeError("realize_sphere: puncture loop holonomy mismatch");
    }
  }
  MarkedSurface done = complete_surface(ms);
  relabel_ends_from_markings(done, n);
  return done;
}

MarkedSurface realize_torus(const PeriodCharacter& chi) {
  chi.validate();
  if (chi.genus != 1 || chi.punctures != 1)
    throw RealizeError("realize_torus: character must live on the once-punctured torus");
  if (!chi.gamma[0].is_zero())
    throw RealizeError("realize_torus: the puncture loop must be trivial");
  const FieldPtr f = chi.field;
  const ExactComplex a = chi.alpha[0], bb = chi.beta[0];
  int vol = cross(a, bb).sign();

  MarkedSurface base;
  HandleSpec spec;
  spec.a = a;
  spec.b = bb;
  spec.alpha_name = "a1";
  spec.beta_name = "b1";
  if (vol > 0) {
    spec.mode = HandleSpec::Mode::ParallelogramInterior;
    base = plane_surface(f, CC(f, 0, 0), CC(f, 1, 0));
    spec.anchor_piece = 0;
    spec.anchor_point = CC(f, 0, 2);
  } else if (vol < 0) {
    spec.mode = HandleSpec::Mode::ParallelogramExterior;
    base = plane_surface(f, CC(f, 0, 0), CC(f, 1, 0));
    spec.anchor_piece = 0;
    spec.anchor_point = CC(f, 0, 2);
  } else if (a.is_zero() && bb.is_zero()) {
    spec.mode = HandleSpec::Mode::Trivial;
    base = cone_surface(f, 1, CC(f, 0, 0), CC(f, 1, 0));
    spec.anchor_at_corner = true;
    spec.anchor_corner = {0, 0};
  } else {
    spec.mode = HandleSpec::Mode::SlitPair;
    base = plane_surface(f, CC(f, 0, 0), CC(f, 1, 0));
    spec.anchor_piece = 0;
    spec.anchor_point = CC(f, 0, 2);
  }
  MarkedSurface out = add_handle(base, spec);
  // the puncture loop: the unique end
  AuditResult audit = audit_surface(out.complex);
  int inf = -1;
  for (size_t e = 0; e < audit.ends.size(); ++e)
    if (audit.ends[e].at_infinity) inf = static_cast<int>(e);
  if (inf < 0 || audit.ends.size() != 1)
    throw RealizeError("realize_torus: expected a single end");
  out.marking["g1"] = audit.ends[inf].loop;
  out.end_labels = {inf};
  return out;
}

MarkedSurface realize_general(const PeriodCharacter& chi) {
  chi.validate();
  const int g = chi.genus, n = chi.punctures;
  if (n < 1) throw RealizeError("realize_general: at least one puncture required");
  if (g == 0) return realize_sphere(chi);
  if (g == 1 && n == 1) return realize_torus(chi);
  const FieldPtr f = chi.field;

  auto [chig, chin] = split_character(chi);
  std::vector<int> neg, zer, pos;
  for (int i = 0; i < g; ++i) {
    int s = cross(chi.alpha[i], chi.beta[i]).sign();
    (s < 0 ? neg : s == 0 ? zer : pos).push_back(i);
  }
  bool any_trivial_handle = false;
  for (int i : zer) any_trivial_handle |= chi.alpha[i].is_zero() && chi.beta[i].is_zero();

  // the sphere part, and the frame direction shared by all ray gluings
  bool chin_trivial = classify_values(chin.all_values()).kind == CharacterClass::Kind::Trivial;
  int jstar = -1;
  for (int j = 0; j < n && jstar < 0; ++j)
    if (!chi.gamma[j].is_zero()) jstar = j;
  MarkedSurface Z;
  ExactComplex dstar = CC(f, 1, 0);
  if (!chin_trivial) {
    Z = realize_sphere(chin);
    // the strip direction of the cylinder realizing gamma_{jstar}
    AuditResult za = audit_surface(Z.complex);
    int e = Z.end_labels.at(jstar);
    int gl = za.ends[e].ray_gluings.front();
    int piece = Z.complex.gluings[gl].a.piece;
    dstar = Z.complex.pieces[piece].ray_dir;
  }
  ExactComplex nstar = dstar.rot90();

  // running placement bound
  Integer bound(8);
  for (const ExactComplex& v : chi.all_values()) bound += coord_bound(v) * 2;
  Rational stride(Integer(bound * 4));

  // base surface: the plane in the dstar frame (or a cone when a trivial
  // handle needs a zero anchor and no chained zero exists)
  MarkedSurface S;
  if (!neg.empty() || !any_trivial_handle)
    S = plane_surface(f, ExactComplex::zero(f), dstar);
  else
    S = cone_surface(f, 1, ExactComplex::zero(f), dstar);

  int gadget = 0;
  auto spot = [&](int k) { return dstar * (stride * Rational(k + 1)) + nstar * stride; };

  // negative-volume handles: chained exterior parallelograms
  ExactComplex chain_corner = ExactComplex::zero(f);
  bool have_chain = false;
  for (size_t idx = 0; idx < neg.size(); ++idx) {
    int i = neg[idx];
    HandleSpec hs;
    hs.mode = HandleSpec::Mode::ParallelogramExterior;
    hs.a = chi.alpha[i];
    hs.b = chi.beta[i];
    hs.alpha_name = "a" + std::to_string(i + 1);
    hs.beta_name = "b" + std::to_string(i + 1);
    bool done = false;
    if (have_chain) {
      // try the four corners of the previous parallelogram
      ExactComplex pu = cross(chi.alpha[neg[idx - 1]], chi.beta[neg[idx - 1]]).sign() > 0
                            ? chi.alpha[neg[idx - 1]]
                            : chi.beta[neg[idx - 1]];
      ExactComplex pv = cross(chi.alpha[neg[idx - 1]], chi.beta[neg[idx - 1]]).sign() > 0
                            ? chi.beta[neg[idx - 1]]
                            : chi.alpha[neg[idx - 1]];
      // for negative-volume pairs the ccw order swaps
      if (cross(pu, pv).sign() < 0) std::swap(pu, pv);
      for (const ExactComplex& corner :
           {chain_corner + pu + pv, chain_corner + pu, chain_corner + pv, chain_corner}) {
        try {
          HandleSpec at = hs;
          at.anchor_at_corner = true;
          at.anchor_corner = find_corner_at(S, corner, -1);
          MarkedSurface out = add_handle(S, at);
          S = std::move(out);
          chain_corner = corner;
          done = true;
          break;
        } catch (const SurgeryError&) {
        } catch (const RealizeError&) {
        }
      }
    }
    if (!done) {
      HandleSpec at = hs;
      at.anchor_point = spot(gadget++);
      at.anchor_piece = find_host(S, at.anchor_point);
      S = add_handle(S, at);
      chain_corner = at.anchor_point;
      have_chain = true;
    }
  }

  // zero-volume handles
  for (int i : zer) {
    HandleSpec hs;
    hs.a = chi.alpha[i];
    hs.b = chi.beta[i];
    hs.alpha_name = "a" + std::to_string(i + 1);
    hs.beta_name = "b" + std::to_string(i + 1);
    if (chi.alpha[i].is_zero() && chi.beta[i].is_zero()) {
      hs.mode = HandleSpec::Mode::Trivial;
      // anchor at any zero of the current surface
      AuditResult a = audit_surface(S.complex);
      CornerRef anchor{-1, -1};
      for (const auto& vc : a.vertex_classes)
        if (vc.order() >= 1) anchor = vc.corners.front();
      if (anchor.piece < 0) throw RealizeError("realize_general: no zero anchor available");
      hs.anchor_at_corner = true;
      hs.anchor_corner = anchor;
    } else {
      hs.mode = HandleSpec::Mode::SlitPair;
      hs.anchor_point = spot(gadget++);
      hs.anchor_piece = find_host(S, hs.anchor_point);
    }
    S = add_handle(S, hs);
  }

  // positive-volume handles
  for (int i : pos) {
    HandleSpec hs;
    hs.mode = HandleSpec::Mode::ParallelogramInterior;
    hs.a = chi.alpha[i];
    hs.b = chi.beta[i];
    hs.alpha_name = "a" + std::to_string(i + 1);
    hs.beta_name = "b" + std::to_string(i + 1);
    hs.anchor_point = spot(gadget++);
    hs.anchor_piece = find_host(S, hs.anchor_point);
    S = add_handle(S, hs);
  }

  if (chin_trivial) {
    // puncture n - 1 regular points directly on the base plane region
    SurfaceBuilder b(S);
    for (int j = 0; j + 1 < n; ++j) {
      ExactComplex p = spot(gadget++) + nstar * (stride * Rational(j + 1));
      int host = -1;
      for (SurfaceBuilder::PieceId pp : b.alive_pieces())
        if (locate_point(b.piece(pp), p) == Region::Interior) {
          host = pp;
          break;
        }
      if (host < 0) throw RealizeError("realize_general: puncture spot not found");
      auto slit =
          b.slit_segment(SurfaceBuilder::at_point(host, p), dstar * Rational(1, 4));
      b.close_slit(slit);
      for (SurfaceBuilder::PieceId pp : b.alive_pieces()) {
        const Piece& geom = b.piece(pp);
        bool found = false;
        for (int ci = 0; ci < static_cast<int>(geom.chain.size()); ++ci)
          if (geom.chain[ci] == p) {
            b.puncture(pp, ci);
            found = true;
            break;
          }
        if (found) break;
      }
    }
    b.log("realize_general: punctured " + std::to_string(n - 1) + " base points");
    MarkedSurface ms = b.finalize();
    // label punctures: removable ends are g1..g_{n-1} in order, the plane
    // end is g_n
    AuditResult audit = audit_surface(ms.complex);
    int k = 0;
    for (size_t e = 0; e < audit.ends.size(); ++e)
      if (!audit.ends[e].at_infinity)
        ms.marking["g" + std::to_string(++k)] = audit.ends[e].loop;
    for (size_t e = 0; e < audit.ends.size(); ++e)
      if (audit.ends[e].at_infinity)
        ms.marking["g" + std::to_string(n)] = audit.ends[e].loop;
    S = std::move(ms);
  } else {
    // glue a plane into the jstar cylinder, then glue Y into that plane
    AuditResult za = audit_surface(Z.complex);
    int e = Z.end_labels.at(jstar);
    int gl = za.ends[e].ray_gluings.front();
    int strip_piece = Z.complex.gluings[gl].a.piece;
    const Piece strip = Z.complex.pieces[strip_piece];
    ExactComplex in_cyl =
        (strip.chain.front() + strip.chain.back()) * Rational(1, 2) + strip.ray_dir;
    SlitSpec rz;
    rz.piece = strip_piece;
    rz.start = in_cyl;
    rz.ray_dir = strip.ray_dir;
    MarkedSurface plane2 =
        plane_surface(f, nstar * (stride * Rational(-4)), strip.ray_dir);
    SlitSpec rp;
    rp.piece = 0;
    rp.at_corner = true;
    rp.corner = 0;
    rp.ray_dir = strip.ray_dir;
    MarkedSurface Zp = ray_slit_glue(Z, rz, plane2, rp);

    // now the far region of the glued plane hosts the second ray
    ExactComplex far_pt =
        nstar * (stride * Rational(-3)) + strip.ray_dir * stride;
    int host = -1;
    for (size_t pi = 0; pi < Zp.complex.pieces.size(); ++pi)
      if (locate_point(Zp.complex.pieces[pi], far_pt) == Region::Interior)
        host = static_cast<int>(pi);
    if (host < 0) throw RealizeError("realize_general: glued plane region not found");
    SlitSpec r1;
    r1.piece = host;
    r1.start = far_pt;
    r1.ray_dir = strip.ray_dir;
    // the ray on S: inside its base plane region, parallel to dstar... the
    // directions must match: use a ray parallel to strip.ray_dir placed in
    // the base-plane half-plane, which is parallel-safe only along dstar.
    // Instead anchor on S at the seam corner and ride the dstar axis when
    // the directions agree; otherwise trace from an interior point.
    SlitSpec r2;
    r2.start = nstar * (stride * Rational(2 * (gadget + 2)));
    r2.piece = find_host(S, r2.start);
    r2.ray_dir = strip.ray_dir;
    MarkedSurface merged = ray_slit_glue(Zp, r1, S, r2);
    S = std::move(merged);
  }

  MarkedSurface done = complete_surface(S);
  relabel_ends_from_markings(done, n);
  done.plan.push_back("realize_general g=" + std::to_string(g) + " n=" + std::to_string(n));
  return done;
}

// ---------------------------------------------------------------------------
// trivial holonomy in a prescribed stratum
// ---------------------------------------------------------------------------

namespace {

// a dry point trace: land after walking `vec` from the corner into its
// sector (or along an edge); returns the landing piece and local position
struct Landing {
  int piece;
  ExactComplex pos;
};

Landing trace_point(const SurfaceBuilder& b, SurfaceBuilder::Corner from,
                    const ExactComplex& vec) {
  // walk with a closed-loop trick: go out and back, recording the midpoint
  // via a manual stepping loop built on ray_exit
  int piece = from.piece;
  ExactComplex pos = b.corner_pos(from);
  // resolve the sector
  if (!b.sector_contains(from, vec)) {
    bool found = false;
    for (const auto& k : b.vertex_class(from)) {
      if (b.sector_contains(k, vec)) {
        piece = k.piece;
        pos = b.corner_pos(k);
        found = true;
        break;
      }
    }
    if (!found) throw RealizeError("trace_point: no sector admits the direction");
  }
  Scalar remaining = Scalar::one(b.field());
  for (int guard = 0; guard < 1000; ++guard) {
    const Piece& geom = b.piece(piece);
    Scalar t;
    bool exits = ray_exit(geom, pos, vec, t);
    if (!exits || t >= remaining) {
      ExactComplex land = pos + vec * remaining;
      if (locate_point(geom, land) != Region::Interior)
        throw RealizeError("trace_point: landing is not interior");
      return {piece, land};
    }
    ExactComplex hit = pos + vec * t;
    bool crossed = false;
    for (int i = 0; i < geom.edge_count() && !crossed; ++i) {
      Edge e = geom.edge(i);
      ExactComplex u = e.kind == Edge::Kind::Segment ? e.b - e.a : e.dir;
      if (!cross(u, hit - e.a).is_zero()) continue;
      Scalar sp = dot(u, hit - e.a);
      bool inside = e.kind == Edge::Kind::Segment
                        ? sp.sign() > 0 && (sp - u.norm2()).sign() < 0
                        : sp.sign() > 0;
      if (!inside) continue;
      if (cross(e.travel(), vec).sign() >= 0) continue;
      SurfaceBuilder::EdgeId eid = b.boundary_edge(piece, i);
      if (!b.is_glued(eid)) throw RealizeError("trace_point: path leaves the surface");
      auto [ea, eb2] = b.gluing_edges(b.gluing_of(eid));
      bool is_a = ea == eid;
      ExactComplex tt = b.gluing_translation(b.gluing_of(eid));
      pos = is_a ? hit + tt : hit - tt;
      piece = b.piece_of(is_a ? eb2 : ea);
      remaining = remaining - t;
      crossed = true;
    }
    if (!crossed) throw RealizeError("trace_point: path runs into a vertex");
  }
  throw RealizeError("trace_point: did not terminate");
}

// mark a twin handle: two cross-glued slits s1 = [p1, p1+e], s2 = [p2, p2+e]
// whose glued sides are (s1.left ~ s2.right) and (s2.left ~ s1.right).
// `rounds1` controls the winding around s1's far end (1 for a regular end,
// higher when the end is a zero); retried internally.
void mark_twin_handle(SurfaceBuilder& b, int hint1, const ExactComplex& p1, int hint2,
                      const ExactComplex& p2, const ExactComplex& e, int max_rounds,
                      const std::string& alpha_name, const std::string& beta_name) {
  auto square = [&](std::vector<ExactComplex>& legs, const ExactComplex& de,
                    const ExactComplex& dm, int times) {
    for (int r = 0; r < times; ++r) {
      legs.push_back(dm + dm);
      legs.push_back(-(de + de));
      legs.push_back(-(dm + dm));
      legs.push_back(de + de);
    }
  };
  Rational d(1, 8);
  for (int attempt = 0; attempt < 8; ++attempt, d /= Rational(3)) {
    ExactComplex de = e * d, dm = e.rot90() * d;
    ExactComplex half = e * Rational(1, 2);
    // beta: around s2, winding (rs, re) at its start/far corners
    CrossingPath beta;
    bool have_beta = false;
    for (int re = 1; re <= max_rounds && !have_beta; ++re)
      for (int rs = 1; rs <= max_rounds && !have_beta; ++rs) {
        std::vector<ExactComplex> legs;
        legs.push_back(e + de + de);
        square(legs, de, dm, re - 1);
        legs.push_back(-(dm + dm));
        legs.push_back(-(e + de + de));
        square(legs, de, dm, rs - 1);
        legs.push_back(dm + dm);
        try {
          beta = b.trace_loop(hint2, p2 - de + dm, legs);
          have_beta = true;
        } catch (const SurgeryError&) {
        }
      }
    if (!have_beta) continue;
    // alpha: cross G1, round s2's far end (r2 windings), cross G2, round
    // s1's far end (r1 windings)
    for (int r1 = 1; r1 <= max_rounds; ++r1)
      for (int r2 = 1; r2 <= max_rounds; ++r2) {
        std::vector<ExactComplex> legs;
        legs.push_back(-(dm + dm));
        legs.push_back(half + de);
        square(legs, de, dm, r2 - 1);
        legs.push_back(dm + dm);
        legs.push_back(-(half + de));
        legs.push_back(-(dm + dm));
        legs.push_back(half + de);
        square(legs, de, dm, r1 - 1);
        legs.push_back(dm + dm);
        legs.push_back(-(half + de));
        try {
          CrossingPath alpha = b.trace_loop(hint1, p1 + half + dm, legs);
          b.set_marking(alpha_name, alpha);
          b.set_marking(beta_name, beta);
          return;
        } catch (const SurgeryError&) {
        }
      }
  }
  throw RealizeError("mark_twin_handle: no closing loops found");
}

// registry of zeros ordered like the current order sequence; positions are
// exact local coordinates in their pieces, saddle = developed vector from
// the previous zero in the list (meaningful for the last entries)
struct ZeroReg {
  ExactComplex pos;
  int order = 0;
  ExactComplex saddle;  // vector from the previous registry entry to this one
};

CornerRef corner_of_zero(const MarkedSurface& ms, const ExactComplex& pos, int order) {
  return find_corner_at(ms, pos, 2 * (order + 1));
}

// split the last registry zero (of order d) into (d - part, part), placing
// the new zero at decayed distance; updates the registry
MarkedSurface split_tail(MarkedSurface ms, std::vector<ZeroReg>& reg, int keep, int part,
                         Rational& scale, int dir_seed) {
  ZeroReg& tail = reg.back();
  if (tail.order != keep + part) throw RealizeError("split_tail: order bookkeeping broke");
  const FieldPtr f = ms.complex.pieces[0].chain[0].field();
  static const int dirs[][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
  for (int attempt = 0; attempt < 12; ++attempt) {
    int di = (dir_seed + attempt) % 4;
    ExactComplex c = CC(f, Rational(dirs[di][0]), Rational(dirs[di][1])) * scale;
    if (same_direction(c, tail.saddle) || same_direction(-c, tail.saddle)) continue;
    try {
      CornerRef v = corner_of_zero(ms, tail.pos, keep + part);
      MarkedSurface out = split_zero(ms, v, keep, part, c, true);
      scale /= Rational(3);
      ZeroReg nz{tail.pos + c, part, c};
      tail.order = keep;
      reg.push_back(nz);
      return out;
    } catch (const SurgeryError&) {
      scale /= Rational(2);
    }
  }
  throw RealizeError("split_tail: no embedded saddle found");
}

// sphere case of the trivial-stratum construction (Prop on punctured
// spheres); fills the zero registry in kappa order
MarkedSurface trivial_sphere(const FieldPtr& f, const std::vector<int>& kappa,
                             const std::vector<int>& nu, std::vector<ZeroReg>& reg,
                             Rational& scale) {
  const int n = static_cast<int>(nu.size());
  const int k = static_cast<int>(kappa.size());
  // cone apexes placed far apart so positions are globally unique
  auto apex = [&](int i) { return CC(f, Rational(1000 * (i + 1)), Rational(0)); };

  // m = least index with sum(p_i - 1) >= d_1 + 1
  int m = 0;
  long acc = 0;
  while (m < n) {
    acc += nu[m] - 1;
    ++m;
    if (acc >= kappa[0] + 1) break;
  }
  if (acc < kappa[0] + 1) throw RealizeError("trivial_sphere: order condition violated");

  MarkedSurface Y;
  int t = 0;                  // poles used so far
  std::vector<int> built;    // orders of current zeros (d_1 .. d_{s-1}, dtilde)
  if (m == 1) {
    Y = cone_surface(f, nu[0] - 2, apex(0), CC(f, 1, 0));
    t = 1;
    reg.push_back({apex(0), nu[0] - 2, ExactComplex::zero(f)});
    built = {nu[0] - 2};
  } else {
    // ptilde with sum_{i<m}(p_i - 1) + (ptilde - 1) = d_1 + 1
    long head = 0;
    for (int i = 0; i + 1 < m; ++i) head += nu[i] - 1;
    long ptilde = kappa[0] + 2 - head;
    long d_second = m + nu[m - 1] - ptilde - 1;  // order at Q in case 1
    bool case1 = k < 2 || d_second >= kappa[1];
    ExactComplex c = CC(f, Rational(1, 7), Rational(1, 11)) * scale;
    scale /= Rational(3);

    std::vector<MarkedSurface> parts;
    std::vector<SlitSite> sites;
    int special, porder_special;
    int mm = m;
    if (case1) {
      special = m - 1;  // the surface that gets split (0-based)
      porder_special = static_cast<int>(ptilde);
    } else {
      // m' = least count with sum of the first m' pole orders >= d1 + d2 + 2
      int m2 = 0;
      long total = 0;
      while (m2 < n && total < kappa[0] + kappa[1] + 2) total += nu[m2++];
      if (total < kappa[0] + kappa[1] + 2)
        throw RealizeError("trivial_sphere: degree condition violated");
      // m'' = least count with m' + sum_{i<=m''}(p_i - 2) >= d1 + 1
      int mpp = 0;
      long acc2 = m2;
      while (mpp < m2) {
        acc2 += nu[mpp] - 2;
        ++mpp;
        if (acc2 >= kappa[0] + 1) break;
      }
      special = mpp - 1;
      // p' with m' + sum_{i<=m''}(p_i - 2) + (p' - p_m'') = d1 + 1
      porder_special = static_cast<int>(kappa[0] + 1 - acc2 + nu[special]);
      mm = m2;
    }
    // build the surfaces with slits
    for (int i = 0; i < mm; ++i) {
      MarkedSurface cone = cone_surface(f, nu[i] - 2, apex(i), c);
      SlitSite site;
      site.surface = i;
      if (i == special) {
        // split its zero into (porder_special - 2, p_i - porder_special)
        std::vector<ZeroReg> tmp{{apex(i), nu[i] - 2, ExactComplex::zero(f)}};
        Rational sc = scale;
        MarkedSurface W = cone;
        int keep = porder_special - 2, part = nu[i] - porder_special;
        CornerRef v = corner_of_zero(W, apex(i), nu[i] - 2);
        W = split_zero(W, v, keep, part, c, true);
        parts.push_back(W);
        (void)sc;
        (void)tmp;
        // the slit rides the saddle [A, B] = [apex, apex + c]
        site.slit.piece = v.piece;
        site.slit.at_corner = false;
        site.slit.start = apex(i);
        site.slit.vec = c;
        // anchor at the corner of A toward c
        CornerRef a_corner = corner_of_zero(W, apex(i), keep);
        site.slit.at_corner = true;
        site.slit.piece = a_corner.piece;
        site.slit.corner = a_corner.corner;
      } else if (case1 ? true : i < special) {
        // slit from the zero outward: P_i singular, Q_i regular
        parts.push_back(cone);
        CornerRef z = corner_of_zero(parts.back(), apex(i), nu[i] - 2);
        site.slit.at_corner = true;
        site.slit.piece = z.piece;
        site.slit.corner = z.corner;
        site.slit.vec = c;
      } else {
        // slit into the zero: P_i regular, Q_i singular
        parts.push_back(cone);
        site.slit.at_corner = false;
        site.slit.piece = 0;
        site.slit.start = apex(i) - c;
        site.slit.vec = c;
      }
      sites.push_back(site);
    }
    Y = sequential_slit_glue(parts, sites);
    t = mm;
    long d1check = 0, dq = 0;
    if (case1) {
      d1check = head + ptilde - 1;
      dq = m + nu[m - 1] - ptilde - 1;
    } else {
      long base = mm;
      for (int i = 0; i <= special; ++i) base += nu[i] - 2;
      d1check = base + porder_special - nu[special];
      long totp = 0;
      for (int i = 0; i < mm; ++i) totp += nu[i];
      dq = totp - d1check - 2;
    }
    if (d1check != kappa[0]) throw RealizeError("trivial_sphere: P order bookkeeping broke");
    reg.push_back({apex(0), kappa[0], ExactComplex::zero(f)});
    reg.push_back({apex(0) + c, static_cast<int>(dq), c});
    built = {kappa[0], static_cast<int>(dq)};
  }

  // grow until every pole is used
  int guard = 0;
  while (t < n) {
    if (++guard > 64) throw RealizeError("trivial_sphere: growth loop stuck");
    int svar = static_cast<int>(built.size());
    long dtilde = built.back();
    // r: largest index (1-based s..k-1) with dtilde >= d_s + .. + d_r
    int r = svar - 1;  // 0-based: built matches kappa[0..svar-2] + tail
    long run = 0;
    for (int j = svar - 1; j < k - 1; ++j) {
      run += kappa[j];
      if (dtilde >= run) r = j;
      else break;
    }
    // t' smallest with dtilde + sum p_{t..t+t'-1} >= d_s + .. + d_{r+1}
    long need = 0;
    for (int j = svar - 1; j <= r + 1; ++j) need += kappa[j];
    long have = dtilde;
    int tprime = 0;
    while (t + tprime < n && have < need) {
      have += nu[t + tprime];
      ++tprime;
    }
    if (have < need) throw RealizeError("trivial_sphere: degree shortfall");
    // split the tail zero into kappa[svar-1] .. kappa[r-1], kappa[r]-tprime,
    // remainder
    for (int j = svar - 1; j < r; ++j) {
      long rest = dtilde - kappa[j];
      MarkedSurface next = split_tail(Y, reg, kappa[j], static_cast<int>(rest), scale, j);
      Y = std::move(next);
      built.back() = kappa[j];
      built.push_back(static_cast<int>(rest));
      dtilde = rest;
    }
    long p0_order = kappa[r] - tprime;
    long q0_order = dtilde - kappa[r];  // remainder after taking kappa[r]-t'
    {
      MarkedSurface next = split_tail(Y, reg, static_cast<int>(p0_order),
                                      static_cast<int>(dtilde - p0_order), scale, r);
      Y = std::move(next);
      built.back() = static_cast<int>(p0_order);
      built.push_back(static_cast<int>(dtilde - p0_order));
    }
    (void)q0_order;
    // sequential slit: the saddle [P0, Q0] plus cones t .. t+t'-1 slit into
    // their zeros
    ExactComplex csad = reg.back().saddle;
    std::vector<MarkedSurface> parts{Y};
    std::vector<SlitSite> sites;
    SlitSite s0;
    s0.surface = 0;
    CornerRef p0c = corner_of_zero(Y, reg[reg.size() - 2].pos, static_cast<int>(p0_order));
    s0.slit.at_corner = true;
    s0.slit.piece = p0c.piece;
    s0.slit.corner = p0c.corner;
    s0.slit.vec = csad;
    sites.push_back(s0);
    for (int i = 0; i < tprime; ++i) {
      MarkedSurface cone = cone_surface(f, nu[t + i] - 2, apex(t + i), csad);
      parts.push_back(cone);
      SlitSite site;
      site.surface = 1 + i;
      site.slit.at_corner = false;
      site.slit.piece = 0;
      site.slit.start = apex(t + i) - csad;
      site.slit.vec = csad;
      sites.push_back(site);
    }
    Y = sequential_slit_glue(parts, sites);
    t += tprime;
    // bookkeeping: P absorbed tprime regular tips -> order kappa[r]; Q
    // absorbed the cone zeros
    long new_tail = dtilde - p0_order;
    for (int i = 0; i < tprime; ++i) new_tail += nu[t - tprime + i] - 1;
    built.back() = static_cast<int>(new_tail);
    built[built.size() - 2] = kappa[r];
    reg[reg.size() - 2].order = kappa[r];
    reg.back().order = static_cast<int>(new_tail);
  }

  // final splits: tail holds kappa[s-1..k-1]
  int svar = static_cast<int>(built.size());
  long dtilde = built.back();
  for (int j = svar - 1; j + 1 < k; ++j) {
    long rest = dtilde - kappa[j];
    MarkedSurface next = split_tail(Y, reg, kappa[j], static_cast<int>(rest), scale, j);
    Y = std::move(next);
    dtilde = rest;
  }
  if (dtilde != (k > 0 ? kappa[k - 1] : 0))
    throw RealizeError("trivial_sphere: final order bookkeeping broke");
  return Y;
}

enum class Move { Both, DropOne, DropTwo };

// open twin slits with developed vector e anchored at `c1` (a corner; the
// slit rides toward e) and at the regular landing point `at2`; cross-glue
// and return the frames for marking
void twin_glue(SurfaceBuilder& b, const CornerRef& c1, const Landing& at2,
               const ExactComplex& e) {
  auto o1 = b.slit_segment(SurfaceBuilder::at_corner(c1.piece, c1.corner), e);
  auto o2 = b.slit_segment(SurfaceBuilder::at_point(at2.piece, at2.pos), e);
  b.glue_sides(o1.left, o2.right, e);
  b.glue_sides(o2.left, o1.right, e);
}

}  // namespace

MarkedSurface realize_trivial_stratum(const FieldPtr& f, int genus,
                                      const std::vector<int>& kappa_in,
                                      const std::vector<int>& nu_in) {
  std::vector<int> kappa = kappa_in, nu = nu_in;
  std::sort(kappa.begin(), kappa.end(), std::greater<int>());
  std::sort(nu.begin(), nu.end(), std::greater<int>());
  StratumDecision dec =
      decide_stratum(trivial_character(f, genus, static_cast<int>(nu.size())), kappa, nu);
  if (!dec.realizable)
    throw RealizeError("NotRealizable(" + dec.rule + ")");

  // reduction sequence
  std::vector<int> seq = kappa;
  std::vector<Move> moves;
  for (int r = 0; r < genus; ++r) {
    size_t l = seq.size();
    if (l >= 2 && seq[l - 1] == 1 && seq[l - 2] == 1) {
      moves.push_back(Move::DropTwo);
      seq.pop_back();
      seq.pop_back();
    } else if (l >= 2 && seq[l - 1] == 1) {
      moves.push_back(Move::DropOne);
      seq.pop_back();
      seq.back() -= 1;
    } else if (l >= 2) {
      moves.push_back(Move::Both);
      seq[l - 1] -= 1;
      seq[l - 2] -= 1;
    } else {
      throw RealizeError("realize_trivial_stratum: reduction ran out of zeros");
    }
  }

  std::vector<ZeroReg> reg;
  Rational scale(1, 5);
  MarkedSurface W = trivial_sphere(f, seq, nu, reg, scale);

  static const int dirs[][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {2, 1}, {1, 2}};
  int handle_no = 0;
  for (auto it = moves.rbegin(); it != moves.rend(); ++it) {
    ++handle_no;
    std::string an = "a" + std::to_string(handle_no);
    std::string bn = "b" + std::to_string(handle_no);
    bool done = false;
    for (int attempt = 0; attempt < 24 && !done; ++attempt) {
      try {
        SurfaceBuilder b(W);
        switch (*it) {
          case Move::DropTwo: {
            // {.., c} -> {.., c, 1, 1}: twin slits in two sectors of the
            // last zero
            ZeroReg& tail = reg.back();
            CornerRef v = corner_of_zero(W, tail.pos, tail.order);
            ExactComplex u = CC(f, Rational(dirs[attempt % 6][0]),
                                Rational(dirs[attempt % 6][1])) *
                             (scale / Rational(1 + attempt / 6));
            SurfaceBuilder::Corner k0 = b.class_corner_toward({v.piece, v.corner}, u, 0);
            SurfaceBuilder::Corner k1 = b.class_corner_toward({v.piece, v.corner}, u, 1);
            ExactComplex mid = u * Rational(1, 2);
            ExactComplex p1 = b.corner_pos(k0) + mid;
            ExactComplex p2 = b.corner_pos(k1) + mid;
            auto o1 = b.slit_segment(SurfaceBuilder::at_point(k0.piece, p1), mid);
            auto o2 = b.slit_segment(SurfaceBuilder::at_point(k1.piece, p2), mid);
            b.glue_sides(o1.left, o2.right, mid);
            b.glue_sides(o2.left, o1.right, mid);
            mark_twin_handle(b, k0.piece, p1, k1.piece, p2, mid, 4, an, bn);
            MarkedSurface next = b.finalize();
            reg.push_back({p1, 1, mid});
            reg.push_back({p1 + mid, 1, mid});
            W = std::move(next);
            done = true;
            break;
          }
          case Move::DropOne: {
            // {.., y, x} -> {.., y, x + 1, 1}
            if (reg.size() < 2) throw RealizeError("undo: missing Q");
            ZeroReg& Q = reg[reg.size() - 2];
            ZeroReg& R = reg[reg.size() - 1];
            CornerRef qc = corner_of_zero(W, Q.pos, Q.order);
            // R'_1: along the saddle in a later sector of Q
            int turn = 1 + attempt % std::max(1, Q.order);
            SurfaceBuilder::Corner kq =
                b.class_corner_toward({qc.piece, qc.corner}, R.saddle, turn);
            Landing rp = trace_point(b, kq, R.saddle);
            ExactComplex w = CC(f, Rational(dirs[(attempt + 1) % 6][0]),
                                Rational(dirs[(attempt + 1) % 6][1])) *
                             (scale / Rational(2 + attempt / 6));
            if (same_direction(w, R.saddle) || same_direction(-w, R.saddle))
              throw RealizeError("undo: retry direction");
            CornerRef rc = corner_of_zero(W, R.pos, R.order);
            SurfaceBuilder::Corner kr = b.class_corner_toward({rc.piece, rc.corner}, w, 0);
            ExactComplex p1 = b.corner_pos(kr);
            auto o1 = b.slit_segment(SurfaceBuilder::at_corner(kr.piece, kr.corner), w);
            auto o2 = b.slit_segment(SurfaceBuilder::at_point(rp.piece, rp.pos), w);
            b.glue_sides(o1.left, o2.right, w);
            b.glue_sides(o2.left, o1.right, w);
            mark_twin_handle(b, kr.piece, p1, rp.piece, rp.pos, w, R.order + 3, an, bn);
            MarkedSurface next = b.finalize();
            R.order += 1;
            reg.push_back({p1 + w, 1, w});
            W = std::move(next);
            done = true;
            break;
          }
          case Move::Both: {
            if (reg.size() >= 3) {
              // {.., a, y, x} -> {.., a, y+1, x+1}: twin of the saddle QR
              ZeroReg& P = reg[reg.size() - 3];
              ZeroReg& Q = reg[reg.size() - 2];
              ZeroReg& R = reg[reg.size() - 1];
              CornerRef pc = corner_of_zero(W, P.pos, P.order);
              int turn = 1 + attempt % std::max(1, P.order);
              SurfaceBuilder::Corner kp =
                  b.class_corner_toward({pc.piece, pc.corner}, Q.saddle, turn);
              Landing q1 = trace_point(b, kp, Q.saddle);
              Landing r1{q1.piece, q1.pos};
              // R_1 = Q_1 + saddle(QR): walk within the same neighborhood
              SurfaceBuilder::Corner fake{q1.piece, 0};
              (void)fake;
              // trace from the landing point directly
              {
                // reuse trace_point by a synthetic corner-free walk: step via
                // a tiny closed-loop check is unnecessary; the positioning
                // guarantees a straight segment inside the neighborhood
                r1.pos = q1.pos + R.saddle;
                if (locate_point(b.piece(q1.piece), r1.pos) != Region::Interior)
                  throw RealizeError("undo: R_1 left the landing piece");
              }
              CornerRef qc = corner_of_zero(W, Q.pos, Q.order);
              SurfaceBuilder::Corner kq =
                  b.class_corner_toward({qc.piece, qc.corner}, R.saddle, 0);
              ExactComplex p1 = b.corner_pos(kq);
              auto o1 = b.slit_segment(SurfaceBuilder::at_corner(kq.piece, kq.corner),
                                       R.saddle);
              auto o2 = b.slit_segment(SurfaceBuilder::at_point(q1.piece, q1.pos), R.saddle);
              b.glue_sides(o1.left, o2.right, R.saddle);
              b.glue_sides(o2.left, o1.right, R.saddle);
              mark_twin_handle(b, kq.piece, p1, q1.piece, q1.pos, R.saddle,
                               Q.order + R.order + 4, an, bn);
              MarkedSurface next = b.finalize();
              Q.order += 1;
              R.order += 1;
              W = std::move(next);
              done = true;
            } else {
              // exactly two zeros: twins of the saddle PQ on both sides
              ZeroReg& P = reg[reg.size() - 2];
              ZeroReg& Q = reg[reg.size() - 1];
              CornerRef pc = corner_of_zero(W, P.pos, P.order);
              int turn = 1 + attempt % std::max(1, P.order);
              SurfaceBuilder::Corner kp =
                  b.class_corner_toward({pc.piece, pc.corner}, Q.saddle, turn);
              Landing qt = trace_point(b, kp, Q.saddle);
              CornerRef qc = corner_of_zero(W, Q.pos, Q.order);
              int turn2 = 1 + (attempt / 2) % std::max(1, Q.order);
              SurfaceBuilder::Corner kq =
                  b.class_corner_toward({qc.piece, qc.corner}, -Q.saddle, turn2);
              Landing pt = trace_point(b, kq, -Q.saddle);
              ExactComplex p1 = b.corner_pos(kp);
              auto o1 = b.slit_segment(SurfaceBuilder::at_corner(kp.piece, kp.corner),
                                       Q.saddle);
              auto o2 = b.slit_segment(SurfaceBuilder::at_point(pt.piece, pt.pos), Q.saddle);
              b.glue_sides(o1.left, o2.right, Q.saddle);
              b.glue_sides(o2.left, o1.right, Q.saddle);
              mark_twin_handle(b, kp.piece, p1, pt.piece, pt.pos, Q.saddle,
                               P.order + Q.order + 4, an, bn);
              MarkedSurface next = b.finalize();
              P.order += 1;
              Q.order += 1;
              W = std::move(next);
              done = true;
              (void)qt;
            }
            break;
          }
        }
      } catch (const SurgeryError&) {
      } catch (const RealizeError&) {
      }
    }
    if (!done)
      throw RealizeError("realize_trivial_stratum: handle undo failed");
  }

  // gamma markings: every end is a pole with trivial loop holonomy
  AuditResult audit = audit_surface(W.complex);
  int label = 0;
  W.end_labels.clear();
  for (size_t e = 0; e < audit.ends.size(); ++e) {
    if (!audit.ends[e].at_infinity)
      throw RealizeError("realize_trivial_stratum: output not complete");
    W.marking["g" + std::to_string(++label)] = audit.ends[e].loop;
    W.end_labels.push_back(static_cast<int>(e));
  }
  W.plan.push_back("realize_trivial_stratum g=" + std::to_string(genus));
  return W;
}

}  // namespace holonomy
