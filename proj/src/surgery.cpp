#include "holonomy/surgery.hpp"

#include <algorithm>
#include <sstream>

namespace holonomy {

namespace {

SurfaceBuilder::Anchor to_anchor(const SlitSpec& s, int piece_offset) {
  if (s.at_corner) return SurfaceBuilder::at_corner(s.piece + piece_offset, s.corner);
  return SurfaceBuilder::at_point(s.piece + piece_offset, s.start);
}

std::string fmt(const ExactComplex& z) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < z.re().coeffs().size(); ++i)
    os << (i ? "," : "") << z.re().coeffs()[i].str();
  os << ";";
  for (size_t i = 0; i < z.im().coeffs().size(); ++i)
    os << (i ? "," : "") << z.im().coeffs()[i].str();
  os << ")";
  return os.str();
}

}  // namespace

MarkedSurface disjoint_union(const std::vector<MarkedSurface>& surfaces,
                             std::vector<int>* piece_offsets) {
  if (surfaces.empty()) throw SurgeryError("disjoint_union: no surfaces");
  MarkedSurface out;
  int off = 0;
  if (piece_offsets) piece_offsets->clear();
  int gluing_off = 0;
  for (const MarkedSurface& s : surfaces) {
    if (piece_offsets) piece_offsets->push_back(off);
    for (const Piece& p : s.complex.pieces) out.complex.pieces.push_back(p);
    for (const Gluing& g : s.complex.gluings)
      out.complex.gluings.push_back({{g.a.piece + off, g.a.edge},
                                     {g.b.piece + off, g.b.edge},
                                     g.translation});
    for (const CornerRef& pc : s.complex.punctured_corners)
      out.complex.punctured_corners.push_back({pc.piece + off, pc.corner});
    for (const auto& [name, path] : s.marking) {
      if (out.marking.count(name))
        throw SurgeryError("disjoint_union: duplicate marking name " + name);
      CrossingPath np;
      for (const Crossing& x : path) np.push_back({x.gluing + gluing_off, x.sign});
      out.marking[name] = std::move(np);
    }
    for (const std::string& line : s.plan) out.plan.push_back(line);
    off += static_cast<int>(s.complex.pieces.size());
    gluing_off += static_cast<int>(s.complex.gluings.size());
  }
  return out;
}

MarkedSurface plane_surface(const FieldPtr& f, const ExactComplex& through,
                            const ExactComplex& dir) {
  if (dir.is_zero()) throw SurgeryError("plane_surface: zero direction");
  MarkedSurface ms;
  ms.complex.pieces.push_back(make_half_plane({through}, dir));
  ms.complex.pieces.push_back(make_half_plane({through}, -dir));
  ms.complex.gluings.push_back({{1, 1}, {0, 0}, ExactComplex::zero(f)});
  ms.complex.gluings.push_back({{0, 1}, {1, 0}, ExactComplex::zero(f)});
  return ms;
}

MarkedSurface cone_surface(const FieldPtr& f, int k, const ExactComplex& apex,
                           const ExactComplex& dir) {
  if (k == 0) return plane_surface(f, apex, dir);
  if (k < 0) throw SurgeryError("cone_surface: negative order");
  MarkedSurface ms;
  // sheets j = 0..k: upper half-plane U_j and lower half-plane L_j; the seam
  // rays run from the apex in direction +-dir; gluings identify
  //   U_j ~ L_j along the -dir ray and L_j ~ U_{j+1} along the +dir ray.
  for (int j = 0; j <= k; ++j) {
    ms.complex.pieces.push_back(make_half_plane({apex}, dir));   // 2j
    ms.complex.pieces.push_back(make_half_plane({apex}, -dir));  // 2j+1
  }
  ExactComplex zero = ExactComplex::zero(f);
  for (int j = 0; j <= k; ++j) {
    // negative ray: U_j edge 0 (RayIn) to L_j edge 1 (RayOut)
    ms.complex.gluings.push_back({{2 * j + 1, 1}, {2 * j, 0}, zero});
    // positive ray: U_j edge 1 (RayOut) to L_{j-1} edge 0 (RayIn), cyclic
    int prev = (j + k) % (k + 1);
    ms.complex.gluings.push_back({{2 * j, 1}, {2 * prev + 1, 0}, zero});
  }
  return ms;
}

MarkedSurface sequential_slit_glue(const std::vector<MarkedSurface>& surfaces,
                                   const std::vector<SlitSite>& sites,
                                   const std::optional<HandleInsert>& handle) {
  if (sites.empty()) throw SurgeryError("sequential_slit_glue: no slits");
  for (const SlitSite& site : sites) {
    if (site.surface < 0 || site.surface >= static_cast<int>(surfaces.size()))
      throw SurgeryError("sequential_slit_glue: site references a missing surface");
    if (site.slit.is_ray()) throw SurgeryError("sequential_slit_glue: segment slits only");
  }
  ExactComplex c = sites[0].slit.vec;
  for (const SlitSite& site : sites)
    if (!(site.slit.vec == c) || c.is_zero()) throw SlitVectorMismatch();
  if (handle && sites.size() != 1)
    throw SurgeryError("sequential_slit_glue: handle insert needs exactly one slit");

  std::vector<int> offsets;
  MarkedSurface merged = disjoint_union(surfaces, &offsets);
  SurfaceBuilder b(merged);
  FieldPtr f = b.field();

  std::vector<SurfaceBuilder::OpenSlit> open;
  for (const SlitSite& site : sites)
    open.push_back(b.slit_segment(to_anchor(site.slit, offsets[site.surface]), c));

  const int n = static_cast<int>(open.size());
  if (!handle) {
    for (int i = 0; i < n; ++i) b.glue_sides(open[(i + 1) % n].left, open[i].right, c);
  } else {
    for (int i = 0; i + 1 < n; ++i) b.glue_sides(open[i + 1].left, open[i].right, c);
    // parallelogram spanned by (c, h) with h = alpha (single-site insert)
    ExactComplex h = handle->alpha;
    Scalar vol = cross(c, h);
    if (vol.is_zero())
      throw VolumeSignMismatch("degenerate parallelogram in handle insert");
    if (!(handle->beta == c))
      throw SurgeryError("sequential_slit_glue: handle beta must equal the slit vector");
    ExactComplex pos = open[0].base_dev;  // park the parallelogram over the slit
    std::vector<ExactComplex> quad;
    if (vol.sign() > 0)
      quad = {pos, pos + c, pos + c + h, pos + h};
    else
      quad = {pos, pos + h, pos + h + c, pos + c};
    int P = b.add_piece(make_polygon(quad));
    // locate the two c-sides and the two h-sides on P
    int bottom = -1, top = -1, hs1 = -1, hs2 = -1;
    for (int e = 0; e < 4; ++e) {
      ExactComplex tr = b.piece(P).edge(e).travel();
      if (same_direction(tr, c)) bottom = e;
      else if (same_direction(tr, -c)) top = e;
      else if (hs1 < 0) hs1 = e;
      else hs2 = e;
    }
    // c-sides join the slit cycle: bottom (travel +c) is a left-type side,
    // top a right-type side
    SurfaceBuilder::SlitSide bottom_side{{b.boundary_edge(P, bottom)},
                                         {{Scalar::zero(f), Scalar::one(f)}}};
    SurfaceBuilder::SlitSide top_side{{b.boundary_edge(P, top)},
                                      {{Scalar::zero(f), Scalar::one(f)}}};
    b.glue_sides(bottom_side, open[n - 1].right, c);
    b.glue_sides(open[0].left, top_side, c);
    b.glue_auto(b.boundary_edge(P, hs1), b.boundary_edge(P, hs2));

    // markings by geometric tracing
    int amb_hint = sites[0].slit.piece + offsets[sites[0].surface];
    Rational d(1, 8);
    for (int attempt = 0; attempt < 10; ++attempt, d /= Rational(3)) {
      try {
        ExactComplex dc = c * d;
        ExactComplex dh = h * d;
        ExactComplex mid = pos + c * Rational(1, 2) + h * Rational(1, 2);
        CrossingPath beta = b.trace_loop(P, mid, {c});
        // alpha: enter through the slit, cross the parallelogram, return
        // around the slit tip
        ExactComplex x0 = open[0].base_dev + c * Rational(1, 2) - dh;
        CrossingPath alpha = b.trace_loop(
            amb_hint, x0,
            {h + dh + dh, c * Rational(1, 2) + dc, -(dh + dh), -(c * Rational(1, 2) + dc)});
        b.set_marking(handle->alpha_name, alpha);
        b.set_marking(handle->beta_name, beta);
        break;
      } catch (const SurfaceBuilder::VertexHit&) {
        if (attempt == 9) throw;
      } catch (const SurgeryError&) {
        if (attempt == 9) throw;
      }
    }
  }

  std::ostringstream os;
  os << "sequential_slit_glue n=" << n << " c=" << fmt(c) << (handle ? " with handle" : "");
  b.log(os.str());
  return b.finalize();
}

MarkedSurface ray_slit_glue(const MarkedSurface& s1, const SlitSpec& r1,
                            const MarkedSurface& s2, const SlitSpec& r2) {
  if (!r1.is_ray() || !r2.is_ray()) throw SurgeryError("ray_slit_glue: ray slits required");
  if (!same_direction(r1.ray_dir, r2.ray_dir)) throw RayDirectionMismatch();
  std::vector<int> offsets;
  MarkedSurface merged = disjoint_union({s1, s2}, &offsets);
  SurfaceBuilder b(merged);
  ExactComplex d = r1.ray_dir;  // common parameter unit
  auto o1 = b.slit_ray(to_anchor(r1, offsets[0]), d);
  auto o2 = b.slit_ray(to_anchor(r2, offsets[1]), d);
  b.glue_sides(o1.left, o2.right, d);
  b.glue_sides(o2.left, o1.right, d);
  b.log("ray_slit_glue dir=" + fmt(d));
  return b.finalize();
}

MarkedSurface split_zero(const MarkedSurface& s, const CornerRef& zero, int d1, int d2,
                         const ExactComplex& c, bool allow_marked_point) {
  if (d1 < 0 || d2 < 0 || ((d1 < 1 || d2 < 1) && !allow_marked_point))
    throw SurgeryError("BadPartition: zero parts must be positive");
  const int dtot = d1 + d2;
  if (c.is_zero()) throw SurgeryError("split_zero: zero saddle vector");
  SurfaceBuilder b(s);
  SurfaceBuilder::Corner v{zero.piece, zero.corner};
  int half = b.class_halfturns(v);
  if (half != 2 * (dtot + 1))
    throw SurgeryError("BadPartition: vertex class order does not match d1 + d2");

  // anchor corners at turns 0, d1+1, ..., dtot around the cone
  std::vector<int> turns{0};
  for (int m = d1 + 1; m <= dtot; ++m) turns.push_back(m);
  std::vector<int> slots;
  for (int t : turns) {
    SurfaceBuilder::Corner k = b.class_corner_toward(v, c, t);
    slots.push_back(b.track_corner(k.piece, k.corner));
  }
  std::vector<SurfaceBuilder::OpenSlit> open;
  for (int slot : slots) {
    SurfaceBuilder::Corner k = b.tracked(slot);
    try {
      open.push_back(b.slit_segment(SurfaceBuilder::at_corner(k.piece, k.corner), c));
    } catch (const SlitNotEmbedded&) {
      throw SurgeryError("SplitTooLong: saddle vector leaves the embedded neighborhood");
    }
  }
  const int n = static_cast<int>(open.size());
  for (int j = 0; j < n; ++j) b.glue_sides(open[j].left, open[(j + 1) % n].right, c);
  std::ostringstream os;
  os << "split_zero d=" << dtot << " -> (" << d1 << "," << d2 << ") c=" << fmt(c);
  b.log(os.str());
  return b.finalize();
}

namespace {

// interior handle: single-slit sequential construction with a parallelogram
MarkedSurface interior_handle(const MarkedSurface& s, const HandleSpec& spec) {
  if (cross(spec.a, spec.b).sign() == 0)
    throw VolumeSignMismatch("interior handle needs nonzero volume");
  SlitSite site;
  site.surface = 0;
  site.slit.piece = spec.anchor_at_corner ? spec.anchor_corner.piece : spec.anchor_piece;
  site.slit.at_corner = spec.anchor_at_corner;
  site.slit.corner = spec.anchor_corner.corner;
  site.slit.start = spec.anchor_point;
  site.slit.vec = spec.b;
  HandleInsert ins{spec.a, spec.b, spec.alpha_name, spec.beta_name};
  return sequential_slit_glue({s}, {site}, ins);
}

// trivial handle: twin slits with identical developed image at a zero
MarkedSurface trivial_handle(const MarkedSurface& s, const HandleSpec& spec) {
  if (!spec.a.is_zero() || !spec.b.is_zero())
    throw VolumeSignMismatch("trivial handles carry zero holonomies");
  if (!spec.anchor_at_corner) throw AnchorNotSingular();
  SurfaceBuilder probe(s);
  SurfaceBuilder::Corner v{spec.anchor_corner.piece, spec.anchor_corner.corner};
  if (probe.class_halfturns(v) < 4) throw AnchorNotSingular();
  // twin direction: strictly inside the anchor corner's sector
  const Piece& pg = probe.piece(v.piece);
  ExactComplex out = pg.edge(pg.outgoing_edge(v.corner)).travel();
  ExactComplex rev_in = -pg.edge(pg.incoming_edge(v.corner)).travel();
  ExactComplex u = cross(out, rev_in).sign() > 0 ? out + rev_in : out.rot90();

  Rational eps(1, 4);
  for (int attempt = 0; attempt < 24; ++attempt, eps /= Rational(2)) {
    try {
      SurfaceBuilder b(s);
      ExactComplex step = u * eps;  // twin segment [v + step/2, v + step]
      ExactComplex mid = step * Rational(1, 2);
      SurfaceBuilder::Corner k0 = b.class_corner_toward(v, u, 0);
      SurfaceBuilder::Corner k1 = b.class_corner_toward(v, u, 1);
      ExactComplex p0 = b.corner_pos(k0) + mid;
      ExactComplex p1 = b.corner_pos(k1) + mid;
      auto o1 = b.slit_segment(SurfaceBuilder::at_point(k0.piece, p0), mid);
      auto o2 = b.slit_segment(SurfaceBuilder::at_point(k1.piece, p1), mid);
      b.glue_sides(o1.left, o2.right, mid);
      b.glue_sides(o2.left, o1.right, mid);
      // markings: beta encircles the first twin (holonomy 0); alpha passes
      // through both slit gluings and around their far tips (holonomy 0)
      ExactComplex m = mid.rot90();
      Rational dd = eps / Rational(8);
      ExactComplex du = u * dd, dm = m * dd;
      ExactComplex start_beta = b.corner_pos(k0) + mid + du * Rational(-2) + dm;
      CrossingPath beta = b.trace_loop(
          k0.piece, start_beta,
          {mid + du * Rational(4), -(dm + dm), -(mid + du * Rational(4)), dm + dm});
      // alpha: through the handle once, rounding both slit tips
      ExactComplex start_alpha = b.corner_pos(k0) + mid + mid * Rational(1, 2) + dm;
      ExactComplex fwd = mid * Rational(1, 2) + du;
      CrossingPath alpha = b.trace_loop(
          k0.piece, start_alpha,
          {-(dm + dm), fwd, dm + dm, -fwd, -(dm + dm), fwd, dm + dm, -fwd});
      b.set_marking(spec.alpha_name, alpha);
      b.set_marking(spec.beta_name, beta);
      b.log("add_handle trivial eps=" + eps.str());
      return b.finalize();
    } catch (const SurgeryError& e) {
      if (attempt == 23)
        throw SurgeryError(std::string("trivial_handle: ") + e.what());
    }
  }
  throw SurgeryError("trivial_handle: no embedded twin slits found");
}

// elementary zero-volume handle: (a, 0) via two parallel slits, or (a, b)
// collinear via one slit
MarkedSurface slit_pair_handle(const MarkedSurface& s, const HandleSpec& spec) {
  if (cross(spec.a, spec.b).sign() != 0)
    throw VolumeSignMismatch("slit_pair handles need zero volume");
  if (spec.a.is_zero()) {
    if (spec.b.is_zero()) return trivial_handle(s, spec);
    // swap roles: construct for (b, 0) and then rename with a reversal
    HandleSpec sw = spec;
    sw.a = spec.b;
    sw.b = spec.a;
    sw.alpha_name = spec.beta_name;
    sw.beta_name = spec.alpha_name;
    MarkedSurface out = slit_pair_handle(s, sw);
    // (alpha', beta') = (beta, alpha) is orientation-reversing; flip one
    CrossingPath& p = out.marking[spec.alpha_name];
    std::reverse(p.begin(), p.end());
    for (Crossing& x : p) x.sign = -x.sign;
    return out;
  }
  const ExactComplex& a = spec.a;
  if (spec.anchor_at_corner)
    throw SurgeryError("slit_pair handles take an interior anchor placement");
  ExactComplex p = spec.anchor_point;
  int hint = spec.anchor_piece;

  if (spec.b.is_zero()) {
    // two parallel slits l and l + a, cross-identified
    Rational k(1, 2);
    for (int attempt = 0; attempt < 24; ++attempt, k /= Rational(2)) {
      try {
        SurfaceBuilder b(s);
        ExactComplex sv = a.rot90() * k;
        auto o1 = b.slit_segment(SurfaceBuilder::at_point(hint, p), sv);
        auto o2 = b.slit_segment(SurfaceBuilder::at_point(hint, p + a), sv);
        b.glue_sides(o1.left, o2.right, sv);
        b.glue_sides(o2.left, o1.right, sv);
        Rational dd = k / Rational(8);
        ExactComplex dsv = sv * dd, da = a * dd;
        // alpha: the core loop of the handle cylinder between the slits
        CrossingPath alpha = b.trace_loop(hint, p + da + sv * Rational(1, 2), {a});
        // beta encircles the first slit: holonomy 0
        CrossingPath beta = b.trace_loop(
            hint, p - da - dsv,
            {da + da, sv + dsv + dsv, -(da + da), -(sv + dsv + dsv)});
        b.set_marking(spec.alpha_name, alpha);
        b.set_marking(spec.beta_name, beta);
        b.log("add_handle slit_pair a=" + fmt(a) + " b=0");
        return b.finalize();
      } catch (const SurgeryError&) {
        if (attempt == 23) throw;
      }
    }
  }

  // collinear b = lambda a, lambda != 0: one slit of developed extent
  // [p, p2] with p2 = p + a + |lambda| a, divided at q1 = p + a on the left
  // side and q2 = p + |lambda| a on the right side, cross-identified.
  Scalar lam = real_ratio(spec.a, spec.b);
  int sgn = lam.sign();
  ExactComplex absb = sgn > 0 ? spec.b : -spec.b;  // |lambda| a
  ExactComplex q1 = p + a;
  ExactComplex q2 = p + absb;
  ExactComplex p2 = p + a + absb;
  ExactComplex e = p2 - p;
  SurfaceBuilder b(s);
  FieldPtr f = b.field();
  auto o = b.slit_segment(SurfaceBuilder::at_point(hint, p), e);
  Scalar e2 = e.norm2();
  auto par = [&](const ExactComplex& x) { return dot(e, x - p) / e2; };
  Scalar pa = par(q1), pb = par(q2);
  // carve the sides at their division parameters
  SurfaceBuilder::SlitSide l1, l2, r1, r2;
  auto carve = [&](const SurfaceBuilder::SlitSide& side, const Scalar& cutp, bool left,
                   SurfaceBuilder::SlitSide& lo, SurfaceBuilder::SlitSide& hi) {
    for (size_t i = 0; i < side.edges.size(); ++i) {
      auto [e0, e1] = side.params[i];
      if (e1 <= cutp) {
        lo.edges.push_back(side.edges[i]);
        lo.params.push_back({e0, e1});
      } else if (e0 >= cutp) {
        hi.edges.push_back(side.edges[i]);
        hi.params.push_back({e0, e1});
      } else {
        ExactComplex at = p + e * cutp;
        auto [first, second] = b.split_edge(side.edges[i], at);
        SurfaceBuilder::EdgeId lo_e = left ? first : second;
        SurfaceBuilder::EdgeId hi_e = left ? second : first;
        lo.edges.push_back(lo_e);
        lo.params.push_back({e0, cutp});
        hi.edges.push_back(hi_e);
        hi.params.push_back({cutp, e1});
      }
    }
  };
  carve(o.left, pa, true, l1, l2);
  carve(o.right, pb, false, r1, r2);
  // paper identifications: left [p,q1] ~ right [q2,p2] (shift +pb) and
  // left [q1,p2] ~ right [p,q2] (shift -pa)
  b.glue_sides_shifted(l1, r2, e, -pb);
  b.glue_sides_shifted(l2, r1, e, pa);

  // markings by tracing; retry with shrinking clearances
  Rational dd(1, 16);
  for (int attempt = 0; attempt < 12; ++attempt, dd /= Rational(3)) {
    try {
      ExactComplex du = e * dd;          // small along the slit
      ExactComplex dm = e.rot90() * dd;  // small across the slit
      // alpha: crosses left[q1,p2] ~ right[p,q2] once, around the p2 tip
      ExactComplex xa = q1 + du + dm;
      CrossingPath alpha = b.trace_loop(
          hint, xa,
          {-(dm + dm), (p2 - p), dm + dm, -(p2 - q1)});
      // beta: crosses left[p,q1] ~ right[q2,p2] once, around the p tip
      CrossingPath beta;
      if (sgn > 0) {
        ExactComplex xb = q2 + du - dm;
        beta = b.trace_loop(hint, xb,
                            {dm + dm, -(du + du), -(dm + dm), (q2 - p) + (du + du)});
      } else {
        ExactComplex xb = p + du + dm;
        beta = b.trace_loop(hint, xb,
                            {-(dm + dm), -(q2 - p) - (du + du), dm + dm, du + du});
      }
      b.set_marking(spec.alpha_name, alpha);
      b.set_marking(spec.beta_name, beta);
      break;
    } catch (const SurgeryError& e) {
      if (attempt == 11)
        throw SurgeryError(std::string("slit_pair collinear markings: ") + e.what());
    }
  }
  b.log("add_handle slit_pair collinear a=" + fmt(spec.a));
  return b.finalize();
}

}  // namespace

// exterior parallelogram handle: excise an embedded parallelogram spanned by
// (a, b) at the anchor point and identify its opposite sides
MarkedSurface exterior_handle(const MarkedSurface& s, const HandleSpec& spec) {
  if (cross(spec.a, spec.b).sign() == 0)
    throw VolumeSignMismatch("exterior handle needs nonzero volume");
  // counterclockwise side pair
  bool ccw = cross(spec.a, spec.b).sign() > 0;
  ExactComplex u = ccw ? spec.a : spec.b;
  ExactComplex v = ccw ? spec.b : spec.a;

  SurfaceBuilder b(s);
  ExactComplex q0 = spec.anchor_at_corner
                        ? b.corner_pos({spec.anchor_corner.piece, spec.anchor_corner.corner})
                        : spec.anchor_point;
  int hint = spec.anchor_at_corner ? spec.anchor_corner.piece : spec.anchor_piece;
  FieldPtr f = b.field();
  // locate a corner of the vertex class at `pos` whose sector admits dir
  auto corner_anchor = [&](const ExactComplex& pos, const ExactComplex& dir) {
    for (SurfaceBuilder::PieceId p : b.alive_pieces()) {
      const Piece& g = b.piece(p);
      for (int i = 0; i < static_cast<int>(g.chain.size()); ++i) {
        if (!(g.chain[i] == pos)) continue;
        if (b.sector_contains({p, i}, dir)) return SurfaceBuilder::at_corner(p, i);
        ExactComplex out = g.edge(g.outgoing_edge(i)).travel();
        if (same_direction(out, dir)) return SurfaceBuilder::at_corner(p, i);
      }
    }
    throw SurgeryError("exterior handle: lost a parallelogram corner");
  };

  SurfaceBuilder::Anchor bottom_anchor = SurfaceBuilder::at_point(hint, q0);
  if (spec.anchor_at_corner) {
    // pick a corner of the class whose sector holds the whole (u, v) wedge
    bool found = false;
    for (const auto& k :
         b.vertex_class({spec.anchor_corner.piece, spec.anchor_corner.corner})) {
      if (b.sector_contains(k, u) && b.sector_contains(k, v)) {
        bottom_anchor = SurfaceBuilder::at_corner(k.piece, k.corner);
        found = true;
        break;
      }
    }
    if (!found)
      throw SurgeryError("exterior handle: no sector holds the parallelogram wedge");
  }
  auto o_bottom = b.slit_segment(bottom_anchor, u);
  auto o_top = b.slit_segment(SurfaceBuilder::at_point(hint, q0 + v), u);
  auto o_left = b.slit_segment(corner_anchor(q0, v), v);
  auto o_right = b.slit_segment(corner_anchor(q0 + u, v), v);

  // the interior component is bounded by the four open slits
  ExactComplex inner_pt = q0 + (u + v) * Rational(1, 2);
  SurfaceBuilder::PieceId seed = -1;
  for (SurfaceBuilder::PieceId p : b.alive_pieces())
    if (locate_point(b.piece(p), inner_pt) == Region::Interior) {
      seed = p;
      break;
    }
  if (seed < 0) throw SurgeryError("exterior handle: interior point lost");
  std::vector<SurfaceBuilder::PieceId> inner = b.flood(seed);
  // sanity: the interior must not contain singular or punctured structure
  for (SurfaceBuilder::PieceId p : inner) {
    const Piece& g = b.piece(p);
    if (g.kind != PieceKind::Polygon)
      throw SurgeryError("RegionCollision: parallelogram not embedded in the plane part");
    for (int i = 0; i < static_cast<int>(g.chain.size()); ++i) {
      SurfaceBuilder::Corner c{p, i};
      ExactComplex pos = b.corner_pos(c);
      bool on_boundary = false;
      for (const ExactComplex& cr : {q0, q0 + u, q0 + u + v, q0 + v})
        if (pos == cr) on_boundary = true;
      if (on_boundary) continue;
      try {
        if (b.class_halfturns(c) != 2)
          throw SurgeryError("RegionCollision: singular point inside the parallelogram");
      } catch (const SurgeryError& e) {
        // walks reaching the open boundary are corner classes on the slits
        std::string w = e.what();
        if (w.find("RegionCollision") != std::string::npos) throw;
      }
    }
  }
  b.kill_pieces(inner);

  b.glue_sides(o_top.left, o_bottom.right, u);
  b.glue_sides(o_left.left, o_right.right, v);

  // markings
  Rational dd(1, 8);
  for (int attempt = 0; attempt < 12; ++attempt, dd /= Rational(3)) {
    try {
      ExactComplex du = u * dd, dv = v * dd;
      ExactComplex x0 = q0 - du - dv;
      CrossingPath lu = b.trace_loop(hint, x0, {u + du + du, dv + dv, -(du + du), -(dv + dv)});
      CrossingPath lv = b.trace_loop(hint, x0, {v + dv + dv, du + du, -(dv + dv), -(du + du)});
      // lu has holonomy u, lv holonomy v; assign to (a, b), reversing when
      // the construction swapped the pair
      CrossingPath alpha = ccw ? lu : lv;
      CrossingPath beta = ccw ? lv : lu;
      b.set_marking(spec.alpha_name, alpha);
      b.set_marking(spec.beta_name, beta);
      break;
    } catch (const SurgeryError&) {
      if (attempt == 11) throw;
    }
  }
  b.log("add_handle exterior a=" + fmt(spec.a) + " b=" + fmt(spec.b));
  return b.finalize();
}

MarkedSurface add_handle(const MarkedSurface& s, const HandleSpec& spec) {
  switch (spec.mode) {
    case HandleSpec::Mode::Trivial:
      return trivial_handle(s, spec);
    case HandleSpec::Mode::SlitPair:
      return slit_pair_handle(s, spec);
    case HandleSpec::Mode::ParallelogramInterior:
      if (cross(spec.a, spec.b).sign() <= 0)
        throw VolumeSignMismatch("interior handles need positive volume");
      return interior_handle(s, spec);
    case HandleSpec::Mode::ParallelogramExterior:
      if (cross(spec.a, spec.b).sign() >= 0)
        throw VolumeSignMismatch("exterior handles need negative volume");
      return exterior_handle(s, spec);
  }
  throw SurgeryError("add_handle: unknown mode");
}

namespace {

// a deterministic interior point and a small reference vector of a piece
std::pair<ExactComplex, ExactComplex> piece_probe(const Piece& p, const FieldPtr& f) {
  switch (p.kind) {
    case PieceKind::Polygon: {
      ExactComplex sum = ExactComplex::zero(f);
      for (const ExactComplex& v : p.chain) sum += v;
      ExactComplex center = sum * Rational(1, static_cast<long>(p.chain.size()));
      return {center, (p.chain[1] - p.chain[0]) * Rational(1, 4)};
    }
    case PieceKind::HalfStrip: {
      ExactComplex base = (p.chain.front() + p.chain.back()) * Rational(1, 2);
      return {base + p.ray_dir, p.ray_dir * Rational(1, 2)};
    }
    case PieceKind::HalfPlane: {
      ExactComplex inward = p.ray_dir.rot90();
      return {p.chain.front() + inward, p.ray_dir * Rational(1, 2)};
    }
  }
  throw SurgeryError("piece_probe: unknown kind");
}

}  // namespace

MarkedSurface complete_surface(const MarkedSurface& s) {
  MarkedSurface cur = s;
  for (int round = 0; round < 64; ++round) {
    AuditResult audit = audit_surface(cur.complex);
    int target = -1;
    for (size_t e = 0; e < audit.ends.size(); ++e)
      if (!audit.ends[e].at_infinity) {
        target = static_cast<int>(e);
        break;
      }
    if (target < 0) return cur;
    const int k = audit.ends[target].removable_order;

    // the gamma marking that labels this puncture, when the pipeline stored
    // it as the puncture's audit loop
    std::string gname;
    for (const auto& [name, path] : cur.marking)
      if (path == audit.ends[target].loop) gname = name;

    // fill the puncture: from here on the vertex class is an ordinary point
    int n_inf = 0;
    for (const auto& e : audit.ends) n_inf += e.at_infinity ? 1 : 0;
    MarkedSurface filled = cur;
    filled.complex.punctured_corners.erase(filled.complex.punctured_corners.begin() +
                                           (target - n_inf));

    FieldPtr f = filled.complex.pieces[0].chain[0].field();
    bool done = false;
    MarkedSurface glued;
    for (size_t pi = 0; pi < filled.complex.pieces.size() && !done; ++pi) {
      auto [pt, vec0] = piece_probe(filled.complex.pieces[pi], f);
      ExactComplex vec = vec0;
      for (int attempt = 0; attempt < 12 && !done; ++attempt, vec = vec * Rational(1, 2)) {
        try {
          MarkedSurface cone = cone_surface(f, k, ExactComplex::zero(f), vec);
          std::vector<int> offsets;
          MarkedSurface merged = disjoint_union({filled, cone}, &offsets);
          SurfaceBuilder b(merged);
          auto o1 = b.slit_segment(SurfaceBuilder::at_point(static_cast<int>(pi), pt), vec);
          auto o2 =
              b.slit_segment(SurfaceBuilder::at_point(offsets[1], vec.rot90()), vec);
          b.glue_sides(o1.left, o2.right, vec);
          b.glue_sides(o2.left, o1.right, vec);
          b.log("complete_surface: removable order " + std::to_string(k));
          glued = b.finalize();
          done = true;
        } catch (const SurgeryError&) {
        }
      }
    }
    if (!done) throw SurgeryError("complete_surface: no embedded slit found");

    // point the puncture's loop at the new end (the one using cone pieces)
    AuditResult after = audit_surface(glued.complex);
    int cone_first_piece = static_cast<int>(filled.complex.pieces.size());
    int new_end = -1;
    for (size_t e = 0; e < after.ends.size(); ++e) {
      if (!after.ends[e].at_infinity) continue;
      for (int g : after.ends[e].ray_gluings)
        if (glued.complex.gluings[g].a.piece >= cone_first_piece ||
            glued.complex.gluings[g].b.piece >= cone_first_piece)
          new_end = static_cast<int>(e);
    }
    if (new_end < 0) throw SurgeryError("complete_surface: new end not found");
    if (!gname.empty()) glued.marking[gname] = after.ends[new_end].loop;
    glued.end_labels.clear();
    cur = std::move(glued);
  }
  throw SurgeryError("complete_surface: too many removable punctures");
}

MarkedSurface truncate_glue_cylinders(const MarkedSurface& s1, int end1,
                                      const MarkedSurface& s2, int end2) {
  AuditResult a1 = audit_surface(s1.complex);
  AuditResult a2 = audit_surface(s2.complex);
  if (end1 < 0 || end1 >= static_cast<int>(a1.ends.size()) || end2 < 0 ||
      end2 >= static_cast<int>(a2.ends.size()))
    throw SurgeryError("truncate_glue_cylinders: end index out of range");
  const EndInfo& e1 = a1.ends[end1];
  const EndInfo& e2 = a2.ends[end2];
  if (!e1.at_infinity || !e2.at_infinity || e1.pole_order != 1 || e2.pole_order != 1)
    throw NotSimpleEnd();
  if (!(e1.residue_period + e2.residue_period).is_zero()) throw ResidueMismatch();
  ExactComplex w = e1.residue_period;

  std::vector<int> offsets;
  MarkedSurface merged = disjoint_union({s1, s2}, &offsets);
  FieldPtr f = merged.complex.pieces[0].chain[0].field();

  // cycle pieces per end, with merged offsets
  auto cycle_pieces = [&](const MarkedSurface& s, const EndInfo& e, int off) {
    std::vector<int> out;
    for (int g : e.ray_gluings) {
      out.push_back(s.complex.gluings[g].a.piece + off);
      out.push_back(s.complex.gluings[g].b.piece + off);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  std::vector<int> cyc1 = cycle_pieces(s1, e1, offsets[0]);
  std::vector<int> cyc2 = cycle_pieces(s2, e2, offsets[1]);

  // the wall gluing to anchor the cut: minimal gluing id of the cycle
  auto wall_edge = [&](const MarkedSurface& s, const EndInfo& e, int off) {
    int g = *std::min_element(e.ray_gluings.begin(), e.ray_gluings.end());
    EdgeRef a = s.complex.gluings[g].a;
    return std::pair<int, int>{a.piece + off, a.edge};
  };
  auto [wp1, we1] = wall_edge(s1, e1, offsets[0]);
  auto [wp2, we2] = wall_edge(s2, e2, offsets[1]);

  Rational H(1);
  for (int attempt = 0; attempt < 16; ++attempt, H *= Rational(2)) {
    try {
      SurfaceBuilder b(merged);
      auto cut = [&](int wpiece, int wedge, const std::vector<int>& cyc)
          -> std::pair<SurfaceBuilder::OpenSlit, std::vector<int>> {
        Edge ray = b.piece(wpiece).edge(wedge);
        if (ray.kind == Edge::Kind::Segment)
          throw SurgeryError("truncate_glue_cylinders: wall edge is not a ray");
        ExactComplex P = ray.a + ray.dir * H;
        b.split_edge(b.boundary_edge(wpiece, wedge), P);
        // anchor at the corner of the wall point whose sector admits w or -w
        for (const ExactComplex& dir : {w, -w}) {
          for (SurfaceBuilder::PieceId p : b.alive_pieces()) {
            const Piece& g = b.piece(p);
            for (int i = 0; i < static_cast<int>(g.chain.size()); ++i) {
              if (!(g.chain[i] == P)) continue;
              if (!b.sector_contains({p, i}, dir)) continue;
              auto slit = b.slit_segment(SurfaceBuilder::at_corner(p, i), dir);
              // dead side: the flood staying inside the end cycle lineage
              auto side_dead = [&](const SurfaceBuilder::SlitSide& side) {
                if (side.edges.empty()) return false;
                auto reach = b.flood(b.piece_of(side.edges.front()));
                for (int q : reach)
                  if (!b.in_lineage(cyc, q)) return false;
                return true;
              };
              bool left_dead = side_dead(slit.left);
              bool right_dead = side_dead(slit.right);
              if (left_dead == right_dead)
                throw SurgeryError("truncate_glue_cylinders: cut does not isolate the end");
              std::vector<int> dead = b.flood(
                  b.piece_of((left_dead ? slit.left : slit.right).edges.front()));
              SurfaceBuilder::OpenSlit live;
              live.left = left_dead ? slit.right : slit.left;
              live.is_ray = false;
              live.vec = dir;  // the parameter unit the side was recorded in
              b.kill_pieces(dead);
              return {live, dead};
            }
          }
        }
        throw SurgeryError("truncate_glue_cylinders: no cut anchor found");
      };
      auto [live1, dead1] = cut(wp1, we1, cyc1);
      auto [live2, dead2] = cut(wp2, we2, cyc2);
      (void)dead1;
      (void)dead2;
      // express both sides in +w parameter units, starting at 0
      auto in_w_units = [&](const SurfaceBuilder::OpenSlit& live) {
        SurfaceBuilder::SlitSide side = live.left;
        if (!same_direction(live.vec, w)) {
          SurfaceBuilder::SlitSide flipped;
          for (size_t i = side.edges.size(); i-- > 0;) {
            flipped.edges.push_back(side.edges[i]);
            flipped.params.push_back({-side.params[i].second, -side.params[i].first});
          }
          side = flipped;
        }
        Scalar base = side.params.front().first;
        for (auto& pr : side.params) {
          pr.first = pr.first - base;
          pr.second = pr.second - base;
        }
        return side;
      };
      SurfaceBuilder::SlitSide A = in_w_units(live1);
      SurfaceBuilder::SlitSide B = in_w_units(live2);
      bool a_left = same_direction(b.edge_geom(A.edges.front()).travel(), w);
      bool b_left = same_direction(b.edge_geom(B.edges.front()).travel(), w);
      if (a_left == b_left)
        throw SurgeryError("truncate_glue_cylinders: incompatible cut orientations");
      if (!a_left) std::swap(A, B);
      b.glue_sides(A, B, w);
      b.log("truncate_glue_cylinders w=" + fmt(w) + " H=" + H.str());
      MarkedSurface out = b.finalize();
      out.end_labels.clear();
      return out;
    } catch (const SurgeryError&) {
      if (attempt == 15) throw;
    }
  }
  throw SurgeryError("truncate_glue_cylinders: retries exhausted");
}

}  // namespace holonomy
