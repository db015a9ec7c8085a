#include "holonomy/builder.hpp"

#include <algorithm>

namespace holonomy {

namespace {

const Scalar kNoEnd;  // sentinel upper param for ray edges (null scalar)

bool edges_glue_geom(const Edge& ea, const Edge& eb, const ExactComplex& t) {
  if (ea.kind == Edge::Kind::Segment && eb.kind == Edge::Kind::Segment)
    return ea.a + t == eb.b && ea.b + t == eb.a;
  if ((ea.kind == Edge::Kind::RayOut && eb.kind == Edge::Kind::RayIn) ||
      (ea.kind == Edge::Kind::RayIn && eb.kind == Edge::Kind::RayOut))
    return ea.a + t == eb.a && same_direction(ea.dir, eb.dir);
  return false;
}

}  // namespace

SurfaceBuilder::SurfaceBuilder(FieldPtr field) : field_(std::move(field)) {}

SurfaceBuilder::SurfaceBuilder(const MarkedSurface& ms) {
  if (ms.complex.pieces.empty()) throw SurgeryError("builder: empty surface");
  field_ = ms.complex.pieces[0].chain[0].field();
  std::vector<PieceId> pid;
  for (const Piece& p : ms.complex.pieces) pid.push_back(add_piece(p));
  for (const Gluing& g : ms.complex.gluings)
    glue(boundary_edge(pid[g.a.piece], g.a.edge), boundary_edge(pid[g.b.piece], g.b.edge),
         g.translation);
  marking_ = ms.marking;
  for (const CornerRef& pc : ms.complex.punctured_corners)
    punctured_.push_back({pid[pc.piece], pc.corner});
  end_labels_ = ms.end_labels;
  plan_ = ms.plan;
}

SurfaceBuilder::PieceId SurfaceBuilder::add_piece(const Piece& p) {
  p.validate();
  BPiece bp;
  bp.alive = true;
  bp.geom = p;
  for (int i = 0; i < p.edge_count(); ++i) bp.edge_ids.push_back(fresh_edge());
  PieceId id = static_cast<int>(pieces_.size());
  pieces_.push_back(std::move(bp));
  reindex(id);
  return id;
}

void SurfaceBuilder::reindex(PieceId p) {
  const BPiece& bp = pieces_[p];
  for (size_t i = 0; i < bp.edge_ids.size(); ++i)
    edge_loc_[bp.edge_ids[i]] = {p, static_cast<int>(i)};
}

SurfaceBuilder::GluingId SurfaceBuilder::glue(EdgeId a, EdgeId b, const ExactComplex& t) {
  if (edge_gluing_.count(a) || edge_gluing_.count(b))
    throw SurgeryError("glue: edge already glued");
  if (a == b) throw SurgeryError("glue: cannot glue an edge to itself");
  if (!edges_glue_geom(edge_geom(a), edge_geom(b), t))
    throw SurgeryError("glue: geometry mismatch");
  GluingId id = static_cast<int>(gluings_.size());
  gluings_.push_back({true, a, b, t});
  edge_gluing_[a] = id;
  edge_gluing_[b] = id;
  return id;
}

SurfaceBuilder::GluingId SurfaceBuilder::glue_auto(EdgeId a, EdgeId b) {
  Edge ea = edge_geom(a), eb = edge_geom(b);
  ExactComplex t = eb.kind == Edge::Kind::Segment ? eb.b - ea.a : eb.a - ea.a;
  return glue(a, b, t);
}

SurfaceBuilder::EdgeId SurfaceBuilder::boundary_edge(PieceId p, int position) const {
  return pieces_.at(p).edge_ids.at(position);
}

int SurfaceBuilder::boundary_size(PieceId p) const {
  return static_cast<int>(pieces_.at(p).edge_ids.size());
}

const Piece& SurfaceBuilder::piece(PieceId p) const { return pieces_.at(p).geom; }

Edge SurfaceBuilder::edge_geom(EdgeId e) const {
  auto [p, i] = edge_loc_.at(e);
  return pieces_[p].geom.edge(i);
}

SurfaceBuilder::PieceId SurfaceBuilder::piece_of(EdgeId e) const {
  return edge_loc_.at(e).first;
}

bool SurfaceBuilder::is_glued(EdgeId e) const { return edge_gluing_.count(e) > 0; }

SurfaceBuilder::GluingId SurfaceBuilder::gluing_of(EdgeId e) const {
  auto it = edge_gluing_.find(e);
  if (it == edge_gluing_.end()) throw SurgeryError("gluing_of: edge not glued");
  return it->second;
}

ExactComplex SurfaceBuilder::gluing_translation(GluingId g) const { return gluings_.at(g).t; }

std::pair<SurfaceBuilder::EdgeId, SurfaceBuilder::EdgeId> SurfaceBuilder::gluing_edges(
    GluingId g) const {
  return {gluings_.at(g).a, gluings_.at(g).b};
}

void SurfaceBuilder::set_marking(const std::string& name, CrossingPath path) {
  marking_[name] = std::move(path);
}

void SurfaceBuilder::puncture(PieceId p, int corner) { punctured_.push_back({p, corner}); }

int SurfaceBuilder::track_corner(PieceId p, int corner) {
  tracked_.push_back({p, corner});
  return static_cast<int>(tracked_.size()) - 1;
}

SurfaceBuilder::Corner SurfaceBuilder::tracked(int slot) const {
  auto [p, c] = tracked_.at(slot);
  return {p, c};
}

ExactComplex SurfaceBuilder::marking_holonomy(const std::string& name) const {
  const CrossingPath& path = marking_.at(name);
  ExactComplex h = ExactComplex::zero(field_);
  for (const Crossing& x : path) {
    const BGluing& g = gluings_.at(x.gluing);
    h += x.sign > 0 ? -g.t : g.t;
  }
  return h;
}

ExactComplex SurfaceBuilder::corner_pos(const Corner& c) const {
  return pieces_.at(c.piece).geom.chain.at(c.corner);
}

std::vector<SurfaceBuilder::Corner> SurfaceBuilder::vertex_class(const Corner& c) const {
  std::vector<Corner> cls;
  Corner cur = c;
  size_t guard = 0;
  do {
    cls.push_back(cur);
    const Piece& p = pieces_[cur.piece].geom;
    EdgeId in = pieces_[cur.piece].edge_ids[p.incoming_edge(cur.corner)];
    auto it = edge_gluing_.find(in);
    if (it == edge_gluing_.end())
      throw SurgeryError("vertex_class: walk crosses an unglued edge");
    const BGluing& g = gluings_[it->second];
    EdgeId partner = g.a == in ? g.b : g.a;
    auto [pp, pe] = edge_loc_.at(partner);
    int sc = pieces_[pp].geom.edge_start_corner(pe);
    if (sc < 0) throw SurgeryError("vertex_class: ray glued to segment");
    cur = {pp, sc};
    if (++guard > 100000) throw SurgeryError("vertex_class: walk does not close");
  } while (!(cur.piece == c.piece && cur.corner == c.corner));
  return cls;
}

namespace {
bool upper_half(const ExactComplex& v) {
  int s = v.im().sign();
  if (s > 0) return true;
  if (s < 0) return false;
  return v.re().sign() > 0;
}
}  // namespace

int SurfaceBuilder::class_halfturns(const Corner& c) const {
  ExactComplex r = ExactComplex::of(field_, Rational(1), Rational(0));
  int half = 0;
  for (const Corner& k : vertex_class(c)) {
    const Piece& p = pieces_[k.piece].geom;
    ExactComplex rev_in = -p.edge(p.incoming_edge(k.corner)).travel();
    ExactComplex out = p.edge(p.outgoing_edge(k.corner)).travel();
    ExactComplex w = r * (rev_in * out.conj());
    if (!upper_half(w)) ++half;
    r = upper_half(w) ? w : -w;
  }
  return half;
}

bool SurfaceBuilder::sector_contains(const Corner& c, const ExactComplex& u) const {
  const Piece& p = pieces_.at(c.piece).geom;
  ExactComplex out = p.edge(p.outgoing_edge(c.corner)).travel();
  ExactComplex rev_in = -p.edge(p.incoming_edge(c.corner)).travel();
  // sector sweeps CCW from out to rev_in through an angle in (0, pi]
  if (cross(out, u).sign() <= 0) return false;
  if (cross(u, rev_in).sign() <= 0) return false;
  return true;
}

SurfaceBuilder::Corner SurfaceBuilder::class_corner_toward(const Corner& c,
                                                           const ExactComplex& u,
                                                           int turns) const {
  std::vector<Corner> cls = vertex_class(c);
  std::vector<Corner> hits;
  for (const Corner& k : cls)
    if (sector_contains(k, u)) hits.push_back(k);
  if (hits.empty()) throw SurgeryError("class_corner_toward: no sector contains direction");
  if (turns >= static_cast<int>(hits.size()))
    throw SurgeryError("class_corner_toward: not enough turns around the vertex");
  return hits[turns];
}

void SurfaceBuilder::replace_path_gluing(GluingId old_g, GluingId new_g) {
  for (auto& [name, path] : marking_)
    for (Crossing& x : path)
      if (x.gluing == old_g) x.gluing = new_g;
}

void SurfaceBuilder::path_insert_connectors(PieceId old_piece, PieceId left, PieceId right,
                                            const std::vector<GluingId>& connectors) {
  auto from_piece = [&](const Crossing& x) {
    const BGluing& g = gluings_.at(x.gluing);
    return edge_loc_.at(x.sign > 0 ? g.a : g.b).first;
  };
  auto to_piece = [&](const Crossing& x) {
    const BGluing& g = gluings_.at(x.gluing);
    return edge_loc_.at(x.sign > 0 ? g.b : g.a).first;
  };
  for (auto& [name, path] : marking_) {
    if (path.empty()) continue;
    CrossingPath out;
    for (size_t i = 0; i < path.size(); ++i) {
      out.push_back(path[i]);
      const Crossing& cur = path[i];
      const Crossing& nxt = path[(i + 1) % path.size()];
      PieceId tp = to_piece(cur), fp = from_piece(nxt);
      if (tp == fp) continue;
      bool split_pair = (tp == left && fp == right) || (tp == right && fp == left);
      if (!split_pair) continue;
      if (connectors.empty())
        throw MarkingConflict("path '" + name + "' severed by a cut through piece " +
                              std::to_string(old_piece));
      GluingId cg = connectors.front();
      const BGluing& g = gluings_.at(cg);
      PieceId ga = edge_loc_.at(g.a).first;
      out.push_back({cg, ga == tp ? 1 : -1});
    }
    path = std::move(out);
  }
}

void SurfaceBuilder::remap_corner_refs(PieceId p,
                                       const std::function<std::pair<PieceId, int>(int)>& f) {
  for (auto* vec : {&punctured_, &tracked_})
    for (auto& pc : *vec)
      if (pc.first == p) {
        auto [np, nc] = f(pc.second);
        pc = {np, nc};
      }
}

std::pair<SurfaceBuilder::EdgeId, SurfaceBuilder::EdgeId> SurfaceBuilder::split_edge_local(
    EdgeId e, const ExactComplex& q) {
  auto [pid, pos] = edge_loc_.at(e);
  BPiece& bp = pieces_[pid];
  Piece& g = bp.geom;
  Edge ed = g.edge(pos);
  EdgeId first = fresh_edge(), second = fresh_edge();

  // verify q is strictly interior to the edge
  if (ed.kind == Edge::Kind::Segment) {
    ExactComplex u = ed.b - ed.a;
    if (!cross(u, q - ed.a).is_zero()) throw SurgeryError("split_edge: point not on edge");
    Scalar s = dot(u, q - ed.a);
    if (s.sign() <= 0 || (s - u.norm2()).sign() >= 0)
      throw SurgeryError("split_edge: point not interior to segment");
  } else {
    if (!cross(ed.dir, q - ed.a).is_zero() || dot(ed.dir, q - ed.a).sign() <= 0)
      throw SurgeryError("split_edge: point not interior to ray");
  }

  int insert_at;  // chain insertion index for q
  if (g.kind == PieceKind::Polygon) {
    insert_at = pos + 1;
  } else if (ed.kind == Edge::Kind::RayIn) {
    insert_at = 0;
  } else if (ed.kind == Edge::Kind::RayOut) {
    insert_at = static_cast<int>(g.chain.size());
  } else {
    insert_at = pos;  // segment edge pos spans chain[pos-1] -> chain[pos]
  }
  g.chain.insert(g.chain.begin() + insert_at, q);
  edge_loc_.erase(e);
  bp.edge_ids[pos] = first;
  bp.edge_ids.insert(bp.edge_ids.begin() + pos + 1, second);
  g.validate();

  remap_corner_refs(pid, [&](int corner) -> std::pair<PieceId, int> {
    return {pid, corner >= insert_at ? corner + 1 : corner};
  });
  reindex(pid);
  return {first, second};
}

std::pair<SurfaceBuilder::EdgeId, SurfaceBuilder::EdgeId> SurfaceBuilder::split_edge(
    EdgeId e, const ExactComplex& q) {
  auto git = edge_gluing_.find(e);
  if (git == edge_gluing_.end()) return split_edge_local(e, q);

  GluingId gid = git->second;
  BGluing g = gluings_[gid];
  bool e_is_a = g.a == e;
  EdgeId partner = e_is_a ? g.b : g.a;
  ExactComplex q_partner = e_is_a ? q + g.t : q - g.t;

  // retire the old gluing
  gluings_[gid].alive = false;
  edge_gluing_.erase(g.a);
  edge_gluing_.erase(g.b);

  auto [e1, e2] = split_edge_local(e, q);
  auto [p1, p2] = split_edge_local(partner, q_partner);

  // reglue: first of one side matches second of the other
  GluingId n1, n2;
  if (e_is_a) {
    n1 = glue(e1, p2, g.t);
    n2 = glue(e2, p1, g.t);
  } else {
    n1 = glue(p1, e2, g.t);
    n2 = glue(p2, e1, g.t);
  }
  (void)n2;
  replace_path_gluing(gid, n1);
  return {e1, e2};
}

SurfaceBuilder::ChordCut SurfaceBuilder::cut_chord(PieceId pid, int cp, int cq) {
  BPiece& bp = pieces_[pid];
  Piece old = bp.geom;
  std::vector<EdgeId> old_ids = bp.edge_ids;
  if (cp == cq) throw SurgeryError("cut_chord: identical corners");
  if (old.kind == PieceKind::HalfPlane)
    throw SurgeryError("cut_chord: cannot chord-cut a half-plane");
  const int m = static_cast<int>(old.chain.size());
  ExactComplex P = old.chain[cp], Q = old.chain[cq];
  ExactComplex v = Q - P;
  if (v.is_zero()) throw SurgeryError("cut_chord: zero chord");

  // collect the two boundary arcs (corner index ranges)
  auto build = [&](int from, int to) {
    // corners from..to inclusive走 CCW
    std::vector<int> idx;
    int i = from;
    while (true) {
      idx.push_back(i);
      if (i == to) break;
      i = (i + 1) % m;
    }
    return idx;
  };

  Piece piece1, piece2;  // piece1 = arc cp..cq + chord (right of v), piece2 = other
  std::vector<EdgeId> ids1, ids2;
  EdgeId chord1 = fresh_edge(), chord2 = fresh_edge();

  if (old.kind == PieceKind::Polygon) {
    auto arc1 = build(cp, cq);
    auto arc2 = build(cq, cp);
    piece1.kind = PieceKind::Polygon;
    for (int i : arc1) piece1.chain.push_back(old.chain[i]);
    piece1.ray_dir = ExactComplex::zero(field_);
    // edges of arc1: outgoing edges of each corner except the last, then chord
    for (size_t k = 0; k + 1 < arc1.size(); ++k) ids1.push_back(old_ids[arc1[k]]);
    ids1.push_back(chord1);
    piece2.kind = PieceKind::Polygon;
    for (int i : arc2) piece2.chain.push_back(old.chain[i]);
    piece2.ray_dir = piece1.ray_dir;
    for (size_t k = 0; k + 1 < arc2.size(); ++k) ids2.push_back(old_ids[arc2[k]]);
    ids2.push_back(chord2);
  } else {
    // HalfStrip: both corners on the finite chain; the arc not containing the
    // rays becomes a polygon, the other keeps the rays.
    int lo = std::min(cp, cq), hi = std::max(cp, cq);
    // polygon part: corners lo..hi; strip part: 0..lo + hi..m-1
    Piece poly;
    poly.kind = PieceKind::Polygon;
    std::vector<EdgeId> poly_ids;
    for (int i = lo; i <= hi; ++i) poly.chain.push_back(old.chain[i]);
    poly.ray_dir = ExactComplex::zero(field_);
    for (int i = lo; i < hi; ++i) poly_ids.push_back(old_ids[i + 1]);  // segment edges
    Piece strip;
    strip.kind = PieceKind::HalfStrip;
    strip.ray_dir = old.ray_dir;
    std::vector<EdgeId> strip_ids;
    strip_ids.push_back(old_ids[0]);  // RayIn
    for (int i = 0; i <= lo; ++i) strip.chain.push_back(old.chain[i]);
    for (int i = 1; i <= lo; ++i) strip_ids.push_back(old_ids[i]);
    // chord placeholder inserted below
    for (int i = hi; i < m; ++i) strip.chain.push_back(old.chain[i]);
    std::vector<EdgeId> tail_ids;
    for (int i = hi + 1; i < m; ++i) tail_ids.push_back(old_ids[i]);
    tail_ids.push_back(old_ids[m]);  // RayOut

    // polygon chord direction: closes hi -> lo; strip chord: lo -> hi
    // decide which is piece1 (right of v = Q - P)
    // the polygon's chord edge travels chain[hi] -> chain[lo]
    EdgeId chord_poly = chord1, chord_strip = chord2;
    poly.chain; // polygon chain is lo..hi, chord closes hi->lo: append nothing
    poly_ids.push_back(chord_poly);
    strip_ids.push_back(chord_strip);
    for (EdgeId t : tail_ids) strip_ids.push_back(t);

    // polygon = arc (lo..hi) + closing chord, so relative to the chord
    // direction lo->hi the polygon is... decide by geometry below.
    bool p_is_lo = cp == lo;
    // piece1 must be the arc cp->cq (CCW) side
    if (p_is_lo) {
      piece1 = poly;
      ids1 = poly_ids;
      piece2 = strip;
      ids2 = strip_ids;
      chord1 = chord_poly;
      chord2 = chord_strip;
    } else {
      piece1 = strip;
      ids1 = strip_ids;
      piece2 = poly;
      ids2 = poly_ids;
      chord1 = chord_strip;
      chord2 = chord_poly;
    }
  }

  piece1.validate();
  piece2.validate();

  // install: old piece id becomes piece1; new id for piece2
  bp.geom = piece1;
  bp.edge_ids = ids1;
  BPiece np;
  np.alive = true;
  np.geom = piece2;
  np.edge_ids = ids2;
  PieceId pid2 = static_cast<int>(pieces_.size());
  pieces_.push_back(std::move(np));
  reindex(pid);
  reindex(pid2);
  lineage_[pid].push_back(pid2);

  // remap corner refs: find each old corner by position, disambiguating by
  // the sector edge directions when the chord duplicated the position
  ExactComplex old_out_dir = ExactComplex::zero(field_);
  auto locate = [&](int old_corner) -> std::pair<PieceId, int> {
    ExactComplex pos = old.chain[old_corner];
    ExactComplex out_t = old.edge(old.outgoing_edge(old_corner)).travel();
    ExactComplex in_t = old.edge(old.incoming_edge(old_corner)).travel();
    std::pair<PieceId, int> fallback{-1, -1};
    for (PieceId p : {pid, pid2}) {
      const Piece& g = pieces_[p].geom;
      for (int i = 0; i < static_cast<int>(g.chain.size()); ++i) {
        if (!(g.chain[i] == pos)) continue;
        ExactComplex o = g.edge(g.outgoing_edge(i)).travel();
        ExactComplex in2 = g.edge(g.incoming_edge(i)).travel();
        if (same_direction(o, out_t) && same_direction(in2, in_t)) return {p, i};
        if (fallback.first < 0) fallback = {p, i};
      }
    }
    if (fallback.first >= 0) return fallback;
    throw SurgeryError("cut_chord: lost a corner");
  };
  (void)old_out_dir;
  remap_corner_refs(pid, locate);

  // orientation: which piece lies right of v = Q - P?  piece1 carries the
  // chord edge traversed cq -> cp (i.e. -v), whose interior-left is right of
  // v... derive from the chord edge geometry instead:
  // piece1's chord edge travels from its chain end back to start if polygon
  // arc cp..cq; check by comparing edge geometry.
  ChordCut out;
  // identify the chord travel in piece1
  auto chord_travel = [&](PieceId p, EdgeId ce) {
    const BPiece& b = pieces_[p];
    for (size_t i = 0; i < b.edge_ids.size(); ++i)
      if (b.edge_ids[i] == ce) return b.geom.edge(static_cast<int>(i)).travel();
    throw SurgeryError("cut_chord: chord edge missing");
  };
  ExactComplex t1 = chord_travel(pid, chord1);
  // interior of a piece is left of its boundary travel; chord travel -v means
  // the piece lies right of v.
  bool piece1_right = same_direction(t1, -v);
  out.left_piece = piece1_right ? pid2 : pid;
  out.right_piece = piece1_right ? pid : pid2;
  out.left_edge = piece1_right ? chord2 : chord1;
  out.right_edge = piece1_right ? chord1 : chord2;
  return out;
}

SurfaceBuilder::PieceId SurfaceBuilder::clip_unbounded(PieceId pid, const ExactComplex& q,
                                                       const ExactComplex& avoid) {
  const Piece geom = pieces_[pid].geom;
  if (geom.kind == PieceKind::Polygon) return pid;

  if (geom.kind == PieceKind::HalfStrip) {
    // cut along the line through q + margin parallel to the overall base
    ExactComplex w0 = geom.chain.back() - geom.chain.front();
    ExactComplex d = geom.ray_dir;
    Scalar cw = cross(w0, d);  // > 0
    // level function h(x) = cross(w0, x - front); increasing along d
    auto h = [&](const ExactComplex& x) { return cross(w0, x - geom.chain.front()); };
    Scalar level = h(q);
    if (h(avoid) > level) level = h(avoid);
    for (const ExactComplex& v : geom.chain)
      if (h(v) > level) level = h(v);
    level = level + cw;  // strictly above q, avoid and every chain vertex
    // intersect with both walls: front + s d, back + s d
    Scalar s_in = (level - h(geom.chain.front())) / cw;
    Scalar s_out = (level - h(geom.chain.back())) / cw;
    ExactComplex pin = geom.chain.front() + d * s_in;
    ExactComplex pout = geom.chain.back() + d * s_out;
    EdgeId ray_in = pieces_[pid].edge_ids.front();
    split_edge(ray_in, pin);
    // the walls may be glued to each other, in which case the partner split
    // already subdivided the out-ray; check before splitting
    {
      bool have_pout = false;
      for (const ExactComplex& v : pieces_[pid].geom.chain)
        if (v == pout) have_pout = true;
      if (!have_pout) split_edge(pieces_[pid].edge_ids.back(), pout);
    }
    const Piece& g2 = pieces_[pid].geom;
    int cin = -1, cout = -1;
    for (int i = 0; i < static_cast<int>(g2.chain.size()); ++i) {
      if (g2.chain[i] == pin) cin = i;
      if (g2.chain[i] == pout) cout = i;
    }
    if (cin < 0 || cout < 0) throw SurgeryError("clip_unbounded: lost wall points");
    ChordCut cut = cut_chord(pid, cin, cout);
    std::vector<GluingId> conn{glue_auto(cut.left_edge, cut.right_edge)};
    path_insert_connectors(pid, cut.left_piece, cut.right_piece, conn);
    // q lies in the bounded part (level above q): bounded part is left of
    // pin->pout iff ... just locate q
    PieceId lp = cut.left_piece, rp = cut.right_piece;
    if (locate_point(pieces_[lp].geom, q) != Region::Outside) return lp;
    if (locate_point(pieces_[rp].geom, q) != Region::Outside) return rp;
    throw SurgeryError("clip_unbounded: point lost after strip cut");
  }

  // HalfPlane: cut along the parallel line at twice the relevant depth, then
  // split the band at a seam through the chain front into two half-strips.
  {
    ExactComplex w = geom.ray_dir;
    auto depth_of = [&](const ExactComplex& x) {
      return cross(w, x - pieces_[pid].geom.chain.front());
    };
    Scalar dq = depth_of(q);
    if (dq.sign() <= 0) throw SurgeryError("clip_unbounded: point not interior");
    if (depth_of(avoid) > dq) dq = depth_of(avoid);
    ExactComplex iw = w.rot90();
    // n is perpendicular to w with cross(w, n) = 2*dq
    ExactComplex n = iw * ((dq + dq) / w.norm2());

    // seam through the chain front along n; shift the front outward until
    // neither q nor avoid sits on the seam line
    for (int shift = 0; shift < 4; ++shift) {
      ExactComplex front = pieces_[pid].geom.chain.front();
      bool clear = !cross(n, q - front).is_zero() && !cross(n, avoid - front).is_zero();
      if (clear) break;
      if (shift == 3) throw SurgeryError("clip_unbounded: could not place a clear seam");
      split_edge(pieces_[pid].edge_ids.front(), front - w);
    }
    ExactComplex b0 = pieces_[pid].geom.chain.front();

    const std::vector<ExactComplex> old_chain = pieces_[pid].geom.chain;
    const std::vector<EdgeId> old_ids = pieces_[pid].edge_ids;

    Piece hp;  // far half-plane
    hp.kind = PieceKind::HalfPlane;
    hp.ray_dir = w;
    hp.chain = {b0 + n};
    Piece s_minus;  // strip on the -w side of the seam
    s_minus.kind = PieceKind::HalfStrip;
    s_minus.ray_dir = -w;
    s_minus.chain = {b0, b0 + n};
    Piece s_plus;  // strip on the +w side, carrying the old chain
    s_plus.kind = PieceKind::HalfStrip;
    s_plus.ray_dir = w;
    s_plus.chain = {b0 + n};
    for (const ExactComplex& v : old_chain) s_plus.chain.push_back(v);

    BPiece& bp = pieces_[pid];
    bp.geom = hp;
    bp.edge_ids = {fresh_edge(), fresh_edge()};
    PieceId id_minus = static_cast<int>(pieces_.size());
    {
      BPiece nb;
      nb.alive = true;
      nb.geom = s_minus;
      nb.edge_ids = {old_ids.front(), fresh_edge(), fresh_edge()};
      pieces_.push_back(std::move(nb));
    }
    PieceId id_plus = static_cast<int>(pieces_.size());
    {
      BPiece nb;
      nb.alive = true;
      nb.geom = s_plus;
      nb.edge_ids.push_back(fresh_edge());  // RayIn(b0+n, w)
      nb.edge_ids.push_back(fresh_edge());  // seam segment b0+n -> b0
      for (size_t i = 1; i < old_chain.size(); ++i) nb.edge_ids.push_back(old_ids[i]);
      nb.edge_ids.push_back(old_ids.back());  // old RayOut
      pieces_.push_back(std::move(nb));
    }
    pieces_[pid].geom.validate();
    pieces_[id_minus].geom.validate();
    pieces_[id_plus].geom.validate();
    reindex(pid);
    reindex(id_minus);
    reindex(id_plus);
    lineage_[pid].push_back(id_minus);
    lineage_[pid].push_back(id_plus);

    // old chain corners move to s_plus (shifted by one seam vertex)
    remap_corner_refs(pid, [&](int corner) -> std::pair<PieceId, int> {
      return {id_plus, corner + 1};
    });

    std::vector<GluingId> conn;
    conn.push_back(glue_auto(boundary_edge(id_minus, 1), boundary_edge(id_plus, 1)));
    conn.push_back(glue_auto(boundary_edge(id_minus, 2), boundary_edge(pid, 0)));
    conn.push_back(glue_auto(boundary_edge(id_plus, 0), boundary_edge(pid, 1)));
    path_insert_connectors(pid, id_minus, id_plus, {conn[0]});

    if (locate_point(pieces_[id_plus].geom, q) != Region::Outside) return id_plus;
    if (locate_point(pieces_[id_minus].geom, q) != Region::Outside) return id_minus;
    if (locate_point(pieces_[pid].geom, q) != Region::Outside) return pid;
    throw SurgeryError("clip_unbounded: point lost after half-plane cut");
  }
}

// Cut a half-strip along the interior ray from a chain corner parallel to
// its walls.  Returns the new unglued ray edges (left, right) of the cut.
std::pair<SurfaceBuilder::EdgeId, SurfaceBuilder::EdgeId> SurfaceBuilder::split_strip_ray(
    PieceId pid, int corner) {
  const Piece old = pieces_[pid].geom;
  const std::vector<EdgeId> old_ids = pieces_[pid].edge_ids;
  if (old.kind != PieceKind::HalfStrip)
    throw SurgeryError("split_strip_ray: piece is not a half-strip");
  const int m = static_cast<int>(old.chain.size());
  if (corner <= 0 || corner >= m - 1) {
    // corner on a wall: the ray rides the existing wall; caller handles that
    throw SurgeryError("split_strip_ray: corner must be strictly inside the chain");
  }
  ExactComplex d = old.ray_dir;
  ExactComplex ci = old.chain[corner];

  Piece s1;  // keeps the RayIn side (left of d)
  s1.kind = PieceKind::HalfStrip;
  s1.ray_dir = d;
  for (int i = 0; i <= corner; ++i) s1.chain.push_back(old.chain[i]);
  Piece s2;
  s2.kind = PieceKind::HalfStrip;
  s2.ray_dir = d;
  for (int i = corner; i < m; ++i) s2.chain.push_back(old.chain[i]);

  EdgeId left_ray = fresh_edge();   // RayOut(ci, d) on s1
  EdgeId right_ray = fresh_edge();  // RayIn(ci, d) on s2

  std::vector<EdgeId> ids1, ids2;
  ids1.push_back(old_ids[0]);
  for (int i = 1; i <= corner; ++i) ids1.push_back(old_ids[i]);
  ids1.push_back(left_ray);
  ids2.push_back(right_ray);
  for (int i = corner + 1; i <= m - 1; ++i) ids2.push_back(old_ids[i]);
  ids2.push_back(old_ids[m]);

  s1.validate();
  s2.validate();
  BPiece& bp = pieces_[pid];
  bp.geom = s1;
  bp.edge_ids = ids1;
  PieceId pid2 = static_cast<int>(pieces_.size());
  BPiece nb;
  nb.alive = true;
  nb.geom = s2;
  nb.edge_ids = ids2;
  pieces_.push_back(std::move(nb));
  reindex(pid);
  reindex(pid2);
  lineage_[pid].push_back(pid2);

  remap_corner_refs(pid, [&](int k) -> std::pair<PieceId, int> {
    if (k <= corner) return {pid, k};
    return {pid2, k - corner};
  });
  return {left_ray, right_ray};
}

void SurfaceBuilder::set_edges(PieceId p, std::vector<EdgeId> ids) {
  pieces_[p].edge_ids = std::move(ids);
  reindex(p);
}

SurfaceBuilder::PieceId SurfaceBuilder::resolve_fragment(PieceId hint,
                                                         const ExactComplex& q) const {
  std::vector<PieceId> queue{hint};
  std::vector<PieceId> leaves;
  while (!queue.empty()) {
    PieceId p = queue.back();
    queue.pop_back();
    leaves.push_back(p);
    auto it = lineage_.find(p);
    if (it != lineage_.end())
      for (PieceId f : it->second) queue.push_back(f);
  }
  PieceId boundary_hit = -1;
  for (PieceId p : leaves) {
    if (!pieces_[p].alive) continue;
    Region r = locate_point(pieces_[p].geom, q);
    if (r == Region::Interior) return p;
    if (r == Region::Boundary && boundary_hit < 0) boundary_hit = p;
  }
  if (boundary_hit >= 0) return boundary_hit;
  throw SurgeryError("resolve_fragment: point not found in the piece lineage");
}

bool SurfaceBuilder::in_lineage(const std::vector<PieceId>& roots, PieceId p) const {
  std::vector<PieceId> queue = roots;
  while (!queue.empty()) {
    PieceId r = queue.back();
    queue.pop_back();
    if (r == p) return true;
    auto it = lineage_.find(r);
    if (it != lineage_.end())
      for (PieceId f : it->second) queue.push_back(f);
  }
  return false;
}

std::vector<SurfaceBuilder::PieceId> SurfaceBuilder::flood(PieceId seed) const {
  std::vector<PieceId> out;
  std::map<PieceId, bool> seen;
  std::vector<PieceId> stack{seed};
  seen[seed] = true;
  while (!stack.empty()) {
    PieceId p = stack.back();
    stack.pop_back();
    out.push_back(p);
    for (const BGluing& g : gluings_) {
      if (!g.alive) continue;
      PieceId pa = edge_loc_.at(g.a).first, pb = edge_loc_.at(g.b).first;
      PieceId other = -1;
      if (pa == p) other = pb;
      else if (pb == p) other = pa;
      if (other >= 0 && !seen[other]) {
        seen[other] = true;
        stack.push_back(other);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void SurfaceBuilder::kill_pieces(const std::vector<PieceId>& dead) {
  std::map<PieceId, bool> is_dead;
  for (PieceId p : dead) is_dead[p] = true;
  for (size_t gi = 0; gi < gluings_.size(); ++gi) {
    BGluing& g = gluings_[gi];
    if (!g.alive) continue;
    bool da = is_dead.count(edge_loc_.at(g.a).first) > 0;
    bool db = is_dead.count(edge_loc_.at(g.b).first) > 0;
    if (da != db)
      throw SurgeryError("kill_pieces: region still glued to the outside");
    if (da && db) {
      for (const auto& [name, path] : marking_)
        for (const Crossing& x : path)
          if (x.gluing == static_cast<int>(gi))
            throw MarkingConflict("marked path '" + name + "' enters the removed region");
      g.alive = false;
      edge_gluing_.erase(g.a);
      edge_gluing_.erase(g.b);
    }
  }
  for (PieceId p : dead) {
    for (const auto& pc : punctured_)
      if (pc.first == p) throw SurgeryError("kill_pieces: punctured corner in removed region");
    for (EdgeId e : pieces_[p].edge_ids) {
      if (edge_gluing_.count(e))
        throw SurgeryError("kill_pieces: region boundary is still glued");
      edge_loc_.erase(e);
    }
    pieces_[p].alive = false;
    pieces_[p].edge_ids.clear();
  }
}

std::vector<SurfaceBuilder::PieceId> SurfaceBuilder::alive_pieces() const {
  std::vector<PieceId> out;
  for (size_t i = 0; i < pieces_.size(); ++i)
    if (pieces_[i].alive) out.push_back(static_cast<int>(i));
  return out;
}

int SurfaceBuilder::final_piece_id(PieceId p) const {
  int idx = 0;
  for (size_t i = 0; i < pieces_.size(); ++i) {
    if (static_cast<int>(i) == p) return pieces_[i].alive ? idx : -1;
    if (pieces_[i].alive) ++idx;
  }
  return -1;
}

MarkedSurface SurfaceBuilder::finalize() const {
  // compact alive pieces in id order
  std::map<PieceId, int> pmap;
  MarkedSurface ms;
  for (size_t i = 0; i < pieces_.size(); ++i) {
    if (!pieces_[i].alive) continue;
    pmap[static_cast<int>(i)] = static_cast<int>(ms.complex.pieces.size());
    ms.complex.pieces.push_back(pieces_[i].geom);
  }
  // edge id -> (final piece, edge index)
  std::map<EdgeId, EdgeRef> emap;
  for (const auto& [old_pid, new_pid] : pmap) {
    const BPiece& bp = pieces_[old_pid];
    for (size_t j = 0; j < bp.edge_ids.size(); ++j)
      emap[bp.edge_ids[j]] = {new_pid, static_cast<int>(j)};
  }
  // canonical gluing order with side normalization; record sign flips
  struct Tmp {
    EdgeRef a, b;
    ExactComplex t;
    GluingId old_id;
    bool flipped;
  };
  std::vector<Tmp> tmp;
  for (size_t gi = 0; gi < gluings_.size(); ++gi) {
    const BGluing& g = gluings_[gi];
    if (!g.alive) continue;
    auto ita = emap.find(g.a);
    auto itb = emap.find(g.b);
    if (ita == emap.end() || itb == emap.end())
      throw SurgeryError("finalize: gluing references a retired edge");
    Tmp x{ita->second, itb->second, g.t, static_cast<int>(gi), false};
    if (std::make_pair(x.b.piece, x.b.edge) < std::make_pair(x.a.piece, x.a.edge)) {
      std::swap(x.a, x.b);
      x.t = -x.t;
      x.flipped = true;
    }
    tmp.push_back(std::move(x));
  }
  std::sort(tmp.begin(), tmp.end(), [](const Tmp& x, const Tmp& y) {
    return std::make_pair(std::make_pair(x.a.piece, x.a.edge),
                          std::make_pair(x.b.piece, x.b.edge)) <
           std::make_pair(std::make_pair(y.a.piece, y.a.edge),
                          std::make_pair(y.b.piece, y.b.edge));
  });
  std::map<GluingId, std::pair<int, bool>> gmap;
  for (size_t i = 0; i < tmp.size(); ++i) {
    ms.complex.gluings.push_back({tmp[i].a, tmp[i].b, tmp[i].t});
    gmap[tmp[i].old_id] = {static_cast<int>(i), tmp[i].flipped};
  }
  for (const auto& [name, path] : marking_) {
    CrossingPath p;
    for (const Crossing& x : path) {
      auto it = gmap.find(x.gluing);
      if (it == gmap.end())
        throw MarkingConflict("path '" + name + "' crosses an unglued edge");
      p.push_back({it->second.first, it->second.second ? -x.sign : x.sign});
    }
    ms.marking[name] = std::move(p);
  }
  for (const auto& [pid, corner] : punctured_) {
    auto it = pmap.find(pid);
    if (it == pmap.end()) throw SurgeryError("finalize: punctured corner on dead piece");
    ms.complex.punctured_corners.push_back({it->second, corner});
  }
  ms.end_labels = end_labels_;
  ms.plan = plan_;
  return ms;
}

// ---------------------------------------------------------------------------
// slit tracing
// ---------------------------------------------------------------------------

namespace {

struct Cursor {
  int piece = -1;
  ExactComplex pos;    // local coordinates
  ExactComplex frame;  // local = dev + frame
  bool on_vertex = false;
  int corner = -1;  // valid when on_vertex
};

}  // namespace

struct TraceOps {
  SurfaceBuilder& b;
  const ExactComplex c;  // slit direction; parameter unit = |c|
  const bool is_ray;
  ExactComplex base_dev;

  std::vector<SurfaceBuilder::EdgeId> left_edges, right_edges;
  std::vector<std::pair<Scalar, Scalar>> left_params, right_params;

  Scalar param_local(const Cursor& cur, const ExactComplex& local) const {
    return dot(c, (local - cur.frame) - base_dev) / c.norm2();
  }
  ExactComplex local_of_param(const Cursor& cur, const Scalar& p) const {
    return base_dev + c * p + cur.frame;
  }

  void unglue_checked(SurfaceBuilder::GluingId g) {
    for (auto& [name, path] : b.marking_)
      for (const Crossing& x : path)
        if (x.gluing == g)
          throw MarkingConflict("marked path '" + name + "' crosses the slit");
    SurfaceBuilder::BGluing& bg = b.gluings_.at(g);
    bg.alive = false;
    b.edge_gluing_.erase(bg.a);
    b.edge_gluing_.erase(bg.b);
  }

  void record(SurfaceBuilder::EdgeId left, SurfaceBuilder::EdgeId right, const Scalar& p0,
              const Scalar& p1) {
    left_edges.push_back(left);
    left_params.push_back({p0, p1});
    right_edges.push_back(right);
    right_params.push_back({p0, p1});
  }

  // Ride the surface edge starting at corner `k` of its piece whose travel is
  // positively parallel to c.  Returns the updated cursor, or finishes.
  bool ride(Cursor& cur, SurfaceBuilder::EdgeId eid, Scalar& covered) {
    Edge e = b.edge_geom(eid);
    if (!b.is_glued(eid)) throw SlitNotEmbedded("slit rides an unglued boundary edge");
    Scalar p0 = covered;
    bool infinite = e.kind != Edge::Kind::Segment;
    Scalar p1;
    if (!infinite) p1 = param_local(cur, e.b);

    if (is_ray && infinite) {
      // terminal: the slit follows this ray out to the end
      SurfaceBuilder::GluingId g = b.gluing_of(eid);
      auto [ea, eb] = b.gluing_edges(g);
      SurfaceBuilder::EdgeId partner = ea == eid ? eb : ea;
      unglue_checked(g);
      left_edges.push_back(eid);
      left_params.push_back({p0, kNoEnd});
      right_edges.push_back(partner);
      right_params.push_back({p0, kNoEnd});
      return true;
    }
    if (!is_ray && (infinite || p1 > Scalar::of(b.field_, Rational(1)))) {
      // the slit ends inside this edge: split it there
      ExactComplex end_local = local_of_param(cur, Scalar::one(b.field_));
      auto [first, second] = b.split_edge(eid, end_local);
      (void)second;
      SurfaceBuilder::GluingId g = b.gluing_of(first);
      auto [ea, eb] = b.gluing_edges(g);
      SurfaceBuilder::EdgeId partner = ea == first ? eb : ea;
      unglue_checked(g);
      record(first, partner, p0, Scalar::one(b.field_));
      return true;
    }
    // ride the whole edge
    SurfaceBuilder::GluingId g = b.gluing_of(eid);
    auto [ea, eb] = b.gluing_edges(g);
    SurfaceBuilder::EdgeId partner = ea == eid ? eb : ea;
    unglue_checked(g);
    record(eid, partner, p0, p1);
    covered = p1;
    if (!is_ray && p1 == Scalar::one(b.field_)) return true;  // ends at the far corner
    auto [pp, pe] = b.edge_loc_.at(eid);
    int kend = b.pieces_[pp].geom.edge_end_corner(pe);
    if (kend < 0) throw SurgeryError("ride: segment without end corner");
    cur.piece = pp;
    cur.pos = b.pieces_[pp].geom.chain[kend];
    cur.on_vertex = true;
    cur.corner = kend;
    return false;
  }

  // Mode decision at a vertex: either ride an edge leaving the vertex along
  // +c, or pick the corner whose open sector contains c.  `bound_to_anchor`
  // restricts the search to the given corner (the caller chose the sector).
  // Returns (ride_edge or -1, corner).
  std::pair<SurfaceBuilder::EdgeId, SurfaceBuilder::Corner> resolve_at_vertex(
      const SurfaceBuilder::Corner& hint, bool bound_to_anchor) {
    auto try_corner = [&](const SurfaceBuilder::Corner& k)
        -> std::optional<std::pair<SurfaceBuilder::EdgeId, SurfaceBuilder::Corner>> {
      const Piece& p = b.pieces_[k.piece].geom;
      Edge eout = p.edge(p.outgoing_edge(k.corner));
      if (same_direction(eout.travel(), c))
        return std::make_pair(b.pieces_[k.piece].edge_ids[p.outgoing_edge(k.corner)], k);
      Edge ein = p.edge(p.incoming_edge(k.corner));
      if (same_direction(-ein.travel(), c)) {
        // ride the partner of the incoming edge, which travels +c
        SurfaceBuilder::EdgeId in_id = b.pieces_[k.piece].edge_ids[p.incoming_edge(k.corner)];
        if (!b.is_glued(in_id)) throw SlitNotEmbedded("slit rides an unglued boundary edge");
        auto [ea, eb] = b.gluing_edges(b.gluing_of(in_id));
        return std::make_pair(ea == in_id ? eb : ea, k);
      }
      if (b.sector_contains(k, c))
        return std::make_pair(static_cast<SurfaceBuilder::EdgeId>(-1), k);
      return std::nullopt;
    };
    if (auto r = try_corner(hint)) return *r;
    if (bound_to_anchor)
      throw SurgeryError("slit anchor corner does not admit the slit direction");
    // walk around the vertex through glued edges
    SurfaceBuilder::Corner cur = hint;
    for (int guard = 0; guard < 10000; ++guard) {
      const Piece& p = b.pieces_[cur.piece].geom;
      SurfaceBuilder::EdgeId in_id = b.pieces_[cur.piece].edge_ids[p.incoming_edge(cur.corner)];
      if (!b.is_glued(in_id))
        throw SlitNotEmbedded("slit passes through a cut-open vertex");
      const SurfaceBuilder::BGluing& g = b.gluings_[b.gluing_of(in_id)];
      SurfaceBuilder::EdgeId partner = g.a == in_id ? g.b : g.a;
      auto [pp, pe] = b.edge_loc_.at(partner);
      int sc = b.pieces_[pp].geom.edge_start_corner(pe);
      if (sc < 0) throw SurgeryError("resolve_at_vertex: ray/segment mismatch");
      cur = {pp, sc};
      if (cur.piece == hint.piece && cur.corner == hint.corner)
        throw SlitNotEmbedded("slit direction blocked at a singular vertex");
      if (auto r = try_corner(cur)) return *r;
    }
    throw SurgeryError("resolve_at_vertex: vertex walk does not terminate");
  }

  // One transversal cut across the current piece.  Returns true if the slit
  // ends inside this piece.
  bool cut_across(Cursor& cur, Scalar& covered) {
    const FieldPtr& f = b.field_;
    const Scalar one = Scalar::one(f);

    // make sure the needed carrier exits exist, clipping unbounded pieces
    for (int rounds = 0; rounds < 4; ++rounds) {
      Scalar tf;
      bool has_fwd = ray_exit(b.pieces_[cur.piece].geom, cur.pos, c, tf);
      bool need_bwd = !cur.on_vertex && locate_point(b.pieces_[cur.piece].geom, cur.pos) ==
                                            Region::Interior;
      Scalar tb;
      bool has_bwd =
          !need_bwd || ray_exit(b.pieces_[cur.piece].geom, cur.pos, -c, tb);
      if (has_fwd && has_bwd) break;
      if (is_ray && !has_fwd) return terminal_ray(cur, covered);
      // clip around the far point (the slit end) and the current position
      ExactComplex q = has_fwd ? cur.pos : local_of_param(cur, one);
      int np = b.clip_unbounded(cur.piece, q, cur.pos);
      // relocate the cursor piece: the fragment containing pos with c inward
      cur.piece = relocate(cur, np);
      if (cur.on_vertex) {
        cur.corner = find_corner(cur.piece, cur.pos);
        if (cur.corner < 0) cur.on_vertex = false;
      }
      if (rounds == 3) throw SurgeryError("cut_across: could not bound the carrier");
    }

    const Piece geom = b.pieces_[cur.piece].geom;  // copy: mutation follows
    Scalar tf;
    if (!ray_exit(geom, cur.pos, c, tf)) throw SurgeryError("cut_across: no forward exit");
    ExactComplex fwd_pt = cur.pos + c * tf;
    ExactComplex back_pt = cur.pos;
    if (!cur.on_vertex && locate_point(geom, cur.pos) == Region::Interior) {
      Scalar tb;
      if (!ray_exit(geom, cur.pos, -c, tb)) throw SurgeryError("cut_across: no backward exit");
      back_pt = cur.pos - c * tb;
    }
    Scalar pB = param_local(cur, back_pt);
    Scalar pF = param_local(cur, fwd_pt);
    bool ends_inside = !is_ray && pF >= one;

    // ensure both chord endpoints are corners
    int cB = ensure_corner(cur.piece, back_pt);
    int cF = ensure_corner(cur.piece, fwd_pt);
    if (cB < 0 || cF < 0) throw SurgeryError("cut_across: chord endpoint lost");
    // re-read corner indices after the second split may have shifted them
    cB = find_corner(cur.piece, back_pt);
    cF = find_corner(cur.piece, fwd_pt);

    auto cut = b.cut_chord(cur.piece, cB, cF);

    // subdivide the chord at the slit endpoints that fall strictly inside
    std::vector<Scalar> breaks;
    Scalar zero = Scalar::zero(f);
    if (pB < zero && zero < pF) breaks.push_back(zero);
    if (!is_ray && pB < one && one < pF) breaks.push_back(one);

    struct Sub {
      SurfaceBuilder::EdgeId left, right;
      Scalar p0, p1;
    };
    std::vector<Sub> subs;
    {
      std::vector<SurfaceBuilder::EdgeId> lparts{cut.left_edge};
      std::vector<SurfaceBuilder::EdgeId> rparts{cut.right_edge};
      std::vector<Scalar> bounds{pB};
      for (const Scalar& x : breaks) bounds.push_back(x);
      bounds.push_back(pF);
      for (size_t i = 1; i + 1 < bounds.size(); ++i) {
        ExactComplex at = local_of_param(cur, bounds[i]);
        // the left chord edges are in ascending parameter order
        auto [l1, l2] = b.split_edge(lparts.back(), at);
        lparts.back() = l1;
        lparts.push_back(l2);
        // locate and split the right part containing `at`
        for (size_t j = 0; j < rparts.size(); ++j) {
          Edge er = b.edge_geom(rparts[j]);
          Scalar tpos = dot(er.b - er.a, at - er.a);
          if (cross(er.b - er.a, at - er.a).is_zero() && tpos.sign() > 0 &&
              (tpos - (er.b - er.a).norm2()).sign() < 0) {
            auto [r1, r2] = b.split_edge(rparts[j], at);
            rparts[j] = r1;
            rparts.insert(rparts.begin() + j + 1, r2);
            break;
          }
        }
      }
      for (size_t i = 0; i + 1 < bounds.size(); ++i) {
        Sub s;
        s.p0 = bounds[i];
        s.p1 = bounds[i + 1];
        s.left = lparts[i];
        // find the right part spanning the same range by geometry
        s.right = -1;
        ExactComplex lo = local_of_param(cur, s.p0), hi = local_of_param(cur, s.p1);
        for (SurfaceBuilder::EdgeId r : rparts) {
          Edge er = b.edge_geom(r);
          if (er.kind == Edge::Kind::Segment && er.a == hi && er.b == lo) {
            s.right = r;
            break;
          }
        }
        if (s.right < 0) throw SurgeryError("cut_across: lost chord subdivision");
        subs.push_back(s);
      }
    }

    std::vector<SurfaceBuilder::GluingId> connectors;
    Scalar end_cap = is_ray ? pF : std::min(one, pF);
    for (const Sub& s : subs) {
      bool in_range = s.p0 >= zero && s.p1 <= end_cap && s.p0 < s.p1;
      bool below = s.p1 <= zero;
      bool above = !is_ray && s.p0 >= one;
      if (below || above) {
        connectors.push_back(b.glue(s.left, s.right,
                                    ExactComplex::zero(f)));
      } else if (in_range) {
        record(s.left, s.right, s.p0, s.p1);
      } else {
        throw SurgeryError("cut_across: chord subdivision straddles the slit range");
      }
    }
    b.path_insert_connectors(cur.piece, cut.left_piece, cut.right_piece, connectors);

    if (ends_inside) return true;

    // continue across the boundary at fwd_pt, which now lies on one of the
    // two cut fragments
    if (!try_cross(cur, cut.left_piece, fwd_pt) && !try_cross(cur, cut.right_piece, fwd_pt))
      throw SurgeryError("cut_across: no continuation across the boundary");
    covered = pF;
    return false;
  }

  bool terminal_ray(Cursor& cur, Scalar& covered) {
    // the ray never exits: the piece is a half-strip with c parallel to its
    // rays, or a half-plane with c parallel to its boundary.
    const Piece geom = b.pieces_[cur.piece].geom;
    if (geom.kind == PieceKind::HalfPlane) {
      if (!parallel(geom.ray_dir, c))
        throw SurgeryError("slit_ray: ray points into a half-plane interior");
      int np = b.clip_unbounded(cur.piece, cur.pos, cur.pos);
      cur.piece = relocate(cur, np);
      return terminal_ray(cur, covered);
    }
    if (geom.kind != PieceKind::HalfStrip || !same_direction(geom.ray_dir, c))
      throw SurgeryError("slit_ray: unsupported terminal position");
    // find the backward boundary point, make it a corner, split the strip
    Scalar tb;
    ExactComplex b0 = cur.pos;
    if (locate_point(geom, cur.pos) == Region::Interior) {
      if (!ray_exit(geom, cur.pos, -c, tb))
        throw SurgeryError("slit_ray: strip carrier unbounded both ways");
      b0 = cur.pos - c * tb;
    }
    int k = ensure_corner(cur.piece, b0);
    k = find_corner(cur.piece, b0);
    (void)k;
    // cut the strip along the interior ray from b0
    auto [lray, rray] = b.split_strip_ray(cur.piece, find_corner(cur.piece, b0));
    Scalar p0 = param_local(cur, b0);
    Scalar zero = Scalar::zero(b.field_);
    if (p0 < zero) {
      // re-glue the [p0, 0] portion, keep [0, inf)
      ExactComplex at = local_of_param(cur, zero);
      auto [l1, l2] = b.split_edge(lray, at);
      auto [r1, r2] = b.split_edge(rray, at);
      // left ray travels +c: l1 = segment [b0, at], l2 = RayOut(at)
      // right ray is a RayIn toward b0: r1 = RayIn(at), r2 = segment [at, b0]
      SurfaceBuilder::GluingId conn = b.glue(l1, r2, ExactComplex::zero(b.field_));
      b.path_insert_connectors(cur.piece, b.edge_loc_.at(l1).first, b.edge_loc_.at(r2).first,
                               {conn});
      left_edges.push_back(l2);
      left_params.push_back({zero, kNoEnd});
      right_edges.push_back(r1);
      right_params.push_back({zero, kNoEnd});
    } else {
      left_edges.push_back(lray);
      left_params.push_back({p0, kNoEnd});
      right_edges.push_back(rray);
      right_params.push_back({p0, kNoEnd});
      // if p0 > covered the slit jumped; cannot happen: p0 <= covered
    }
    (void)covered;
    return true;
  }

  int relocate(const Cursor& cur, int hint) {
    // fragment owning pos with c pointing weakly inward
    std::vector<int> cands{hint};
    for (size_t i = 0; i < b.pieces_.size(); ++i)
      if (b.pieces_[i].alive && static_cast<int>(i) != hint) cands.push_back(static_cast<int>(i));
    for (int p : cands) {
      if (!b.pieces_[p].alive) continue;
      Region r = locate_point(b.pieces_[p].geom, cur.pos);
      if (r == Region::Outside) continue;
      if (r == Region::Interior) return p;
      // boundary: accept if moving along c stays inside
      Scalar t;
      if (ray_exit(b.pieces_[p].geom, cur.pos, c, t)) {
        // midpoint test: pos + c * t/2 must not be outside
        ExactComplex mid = cur.pos + c * (t / Scalar::of(b.field_, Rational(2)));
        if (locate_point(b.pieces_[p].geom, mid) != Region::Outside) return p;
      } else if (locate_point(b.pieces_[p].geom, cur.pos + c) != Region::Outside) {
        return p;
      }
    }
    throw SurgeryError("relocate: cursor position lost");
  }

  // Make `pt` a corner of piece p (splitting the boundary edge containing it
  // if necessary); returns a corner index valid immediately afterwards.
  int ensure_corner(int p, const ExactComplex& pt) {
    int k = find_corner(p, pt);
    if (k >= 0) return k;
    const Piece& geom = b.pieces_[p].geom;
    for (int i = 0; i < geom.edge_count(); ++i) {
      Edge e = geom.edge(i);
      ExactComplex u = e.kind == Edge::Kind::Segment ? e.b - e.a : e.dir;
      if (!cross(u, pt - e.a).is_zero()) continue;
      Scalar t = dot(u, pt - e.a);
      bool inside = e.kind == Edge::Kind::Segment
                        ? t.sign() > 0 && (t - u.norm2()).sign() < 0
                        : t.sign() > 0;
      if (!inside) continue;
      b.split_edge(b.pieces_[p].edge_ids[i], pt);
      return find_corner(p, pt);
    }
    return -1;
  }

  int find_corner(int p, const ExactComplex& pt) const {
    const Piece& geom = b.pieces_[p].geom;
    for (int i = 0; i < static_cast<int>(geom.chain.size()); ++i)
      if (geom.chain[i] == pt) return i;
    return -1;
  }

  // Try to cross the gluing at boundary corner `pt` of piece p, moving along
  // c; updates the cursor on success.
  bool try_cross(Cursor& cur, int p, const ExactComplex& pt) {
    const Piece& geom = b.pieces_[p].geom;
    int kc = find_corner(p, pt);
    if (kc < 0) return false;
    for (int which = 0; which < 2; ++which) {
      int ei = which == 0 ? geom.incoming_edge(kc) : geom.outgoing_edge(kc);
      Edge e = geom.edge(ei);
      ExactComplex u = e.travel();
      // c exits strictly through e iff cross(u, c) < 0 and pt is not the
      // outgoing endpoint in the c direction... the strict side test suffices
      if (cross(u, c).sign() >= 0) continue;
      SurfaceBuilder::EdgeId eid = b.pieces_[p].edge_ids[ei];
      if (!b.is_glued(eid)) throw SlitNotEmbedded("slit runs into a cut-open edge");
      const SurfaceBuilder::BGluing& g = b.gluings_[b.gluing_of(eid)];
      bool is_a = g.a == eid;
      SurfaceBuilder::EdgeId partner = is_a ? g.b : g.a;
      ExactComplex pt2 = is_a ? pt + g.t : pt - g.t;
      auto [pp, pe] = b.edge_loc_.at(partner);
      (void)pe;
      cur.frame = cur.frame + (is_a ? g.t : -g.t);
      cur.piece = pp;
      cur.pos = pt2;
      cur.on_vertex = true;
      cur.corner = find_corner(pp, pt2);
      if (cur.corner < 0) throw SurgeryError("try_cross: partner corner missing");
      return true;
    }
    return false;
  }

  SurfaceBuilder::OpenSlit run(const SurfaceBuilder::Anchor& start) {
    Cursor cur;
    cur.frame = ExactComplex::zero(b.field_);
    bool anchored_corner = start.at_corner;
    if (start.at_corner) {
      cur.piece = start.corner.piece;
      cur.corner = start.corner.corner;
      cur.on_vertex = true;
      cur.pos = b.corner_pos(start.corner);
    } else {
      cur.piece = b.resolve_fragment(start.piece, start.point);
      cur.pos = start.point;
      if (locate_point(b.pieces_.at(cur.piece).geom, cur.pos) != Region::Interior)
        throw SurgeryError("slit anchor point must be interior to the piece");
      cur.on_vertex = false;
    }
    base_dev = cur.pos;

    Scalar covered = Scalar::zero(b.field_);
    bool done = false;
    for (int guard = 0; guard < 10000 && !done; ++guard) {
      if (cur.on_vertex) {
        auto [ride_edge, korner] =
            resolve_at_vertex({cur.piece, cur.corner}, anchored_corner && guard == 0);
        if (ride_edge >= 0) {
          // reposition the cursor onto the corner of the ride edge's piece
          auto [pp, pe] = b.edge_loc_.at(ride_edge);
          cur.piece = pp;
          Edge e = b.pieces_[pp].geom.edge(pe);
          // the frame may shift when the ride edge lives on another piece:
          // its start must develop to the current dev position
          ExactComplex dev_here = base_dev + c * covered;
          cur.frame = e.a - dev_here;
          cur.pos = e.a;
          done = ride(cur, ride_edge, covered);
          continue;
        }
        cur.piece = korner.piece;
        cur.corner = korner.corner;
        cur.pos = b.corner_pos(korner);
        ExactComplex dev_here = base_dev + c * covered;
        cur.frame = cur.pos - dev_here;
      }
      done = cut_across(cur, covered);
    }
    if (!done) throw SurgeryError("slit trace did not terminate");

    SurfaceBuilder::OpenSlit out;
    out.left.edges = std::move(left_edges);
    out.left.params = std::move(left_params);
    out.right.edges = std::move(right_edges);
    out.right.params = std::move(right_params);
    out.base_dev = base_dev;
    out.is_ray = is_ray;
    if (is_ray) {
      out.ray_dir = c;
      out.vec = ExactComplex::zero(b.field_);
    } else {
      out.vec = c;
      out.ray_dir = ExactComplex::zero(b.field_);
    }
    return out;
  }
};

SurfaceBuilder::OpenSlit SurfaceBuilder::slit_segment(const Anchor& start,
                                                      const ExactComplex& c) {
  if (c.is_zero()) throw SurgeryError("slit_segment: zero slit vector");
  TraceOps ops{*this, c, false};
  return ops.run(start);
}

SurfaceBuilder::OpenSlit SurfaceBuilder::slit_ray(const Anchor& start, const ExactComplex& d) {
  if (d.is_zero()) throw SurgeryError("slit_ray: zero direction");
  TraceOps ops{*this, d, true};
  return ops.run(start);
}

// ---------------------------------------------------------------------------
// dry path tracing
// ---------------------------------------------------------------------------

CrossingPath SurfaceBuilder::trace_loop(PieceId start_hint, const ExactComplex& start,
                                        const std::vector<ExactComplex>& legs) const {
  PieceId piece = resolve_fragment(start_hint, start);
  if (locate_point(pieces_[piece].geom, start) != Region::Interior)
    throw SurgeryError("trace_loop: start point must be interior");
  ExactComplex sum = ExactComplex::zero(field_);
  for (const ExactComplex& l : legs) sum += l;

  CrossingPath path;
  ExactComplex pos = start;
  for (const ExactComplex& leg : legs) {
    if (leg.is_zero()) continue;
    Scalar remaining = Scalar::one(field_);  // fraction of the leg left
    int guard = 0;
    while (remaining.sign() > 0) {
      if (++guard > 10000) throw SurgeryError("trace_loop: leg does not terminate");
      const Piece& geom = pieces_[piece].geom;
      Scalar t;
      bool exits = ray_exit(geom, pos, leg, t);
      if (!exits || t >= remaining) {
        pos = pos + leg * remaining;
        if (locate_point(geom, pos) == Region::Outside)
          throw SurgeryError("trace_loop: leg leaves the surface");
        remaining = Scalar::zero(field_);
        break;
      }
      // cross at pos + t*leg
      ExactComplex hit = pos + leg * t;
      // the crossing point must be interior to a glued edge
      bool crossed = false;
      for (int i = 0; i < geom.edge_count() && !crossed; ++i) {
        Edge e = geom.edge(i);
        ExactComplex u = e.kind == Edge::Kind::Segment ? e.b - e.a : e.dir;
        if (!cross(u, hit - e.a).is_zero()) continue;
        // hit on the carrier; on the edge span?
        Scalar sp = dot(u, hit - e.a);
        bool inside_span = e.kind == Edge::Kind::Segment
                               ? sp.sign() > 0 && (sp - u.norm2()).sign() < 0
                               : sp.sign() > 0;
        if (!inside_span) {
          // endpoint hit: a vertex
          bool endpoint = e.kind == Edge::Kind::Segment
                              ? sp.is_zero() || (sp - u.norm2()).is_zero()
                              : sp.is_zero();
          if (endpoint && cross(e.travel(), leg).sign() != 0) continue;
          continue;
        }
        // must actually exit through this edge
        ExactComplex trav = e.travel();
        if (cross(trav, leg).sign() >= 0) continue;
        EdgeId eid = pieces_[piece].edge_ids[i];
        auto git = edge_gluing_.find(eid);
        if (git == edge_gluing_.end())
          throw SurgeryError("trace_loop: path exits through an unglued edge");
        const BGluing& g = gluings_[git->second];
        bool is_a = g.a == eid;
        path.push_back({git->second, is_a ? 1 : -1});
        EdgeId partner = is_a ? g.b : g.a;
        pos = is_a ? hit + g.t : hit - g.t;
        piece = edge_loc_.at(partner).first;
        remaining = remaining - t;
        crossed = true;
      }
      if (!crossed) {
        // the exit point is a vertex
        for (int ci = 0; ci < geom.corner_count(); ++ci)
          if (geom.chain[ci] == hit) throw VertexHit();
        throw SurgeryError("trace_loop: exit point not found on the boundary");
      }
    }
  }
  // closure: same piece (up to fragments) and same local point
  if (!(pos == start) || piece != resolve_fragment(start_hint, start))
    throw SurgeryError("trace_loop: polyline does not close up");
  return path;
}

// ---------------------------------------------------------------------------
// side gluing
// ---------------------------------------------------------------------------

std::vector<SurfaceBuilder::GluingId> SurfaceBuilder::glue_sides(
    const SlitSide& a, const SlitSide& b, const ExactComplex& unit) {
  return glue_sides_shifted(a, b, unit, Scalar::zero(field_));
}

std::vector<SurfaceBuilder::GluingId> SurfaceBuilder::glue_sides_shifted(
    const SlitSide& a, const SlitSide& b, const ExactComplex& unit, const Scalar& offset) {
  // merge parameter breakpoints and split edges so both lists align
  struct Item {
    EdgeId edge;
    Scalar p0, p1;  // p1 null => ray tail
  };
  auto to_items = [&](const SlitSide& s, bool shift) {
    std::vector<Item> v;
    for (size_t i = 0; i < s.edges.size(); ++i) {
      Scalar p0 = s.params[i].first, p1 = s.params[i].second;
      if (shift) {
        p0 = p0 + offset;
        if (p1.field()) p1 = p1 + offset;
      }
      v.push_back({s.edges[i], p0, p1});
    }
    return v;
  };
  std::vector<Item> A = to_items(a, false), B = to_items(b, true);
  if (A.empty() || B.empty()) throw SurgeryError("glue_sides: empty side");

  // split the edge spanning [p0, p1] at parameter x; returns the two items
  auto split_item = [&](Item& it, const Scalar& x, bool left_side) -> Item {
    // position along the edge: fraction (x - p0) / (p1 - p0) of the segment
    Edge e = edge_geom(it.edge);
    ExactComplex at;
    if (e.kind == Edge::Kind::Segment) {
      Scalar span = it.p1 - it.p0;
      Scalar f = (x - it.p0) / span;
      // left edges travel with increasing parameter, right edges against it
      at = left_side ? e.a + (e.b - e.a) * f
                     : e.b + (e.a - e.b) * f;
    } else {
      at = e.a + unit * (x - it.p0);
    }
    auto [first, second] = split_edge(it.edge, at);
    Item tail;
    if (e.kind == Edge::Kind::Segment) {
      if (left_side) {
        it.edge = first;  // [p0, x]
        tail = {second, x, it.p1};
      } else {
        // boundary order: right edge travels from p1-end to p0-end
        it.edge = second;  // [p0, x]
        tail = {first, x, it.p1};
      }
    } else {
      if (e.kind == Edge::Kind::RayOut) {
        it.edge = first;  // segment [p0, x]
        tail = {second, x, kNoEnd};
        it.p1 = x;
        return tail;
      } else {
        // RayIn splits into RayIn(at) + segment [at, base]
        it.edge = second;
        tail = {first, x, kNoEnd};
        it.p1 = x;
        return tail;
      }
    }
    Scalar old_p1 = it.p1;
    it.p1 = x;
    tail.p1 = old_p1;
    return tail;
  };

  std::vector<GluingId> out;
  size_t ia = 0, ib = 0;
  int guard = 0;
  while (ia < A.size() && ib < B.size()) {
    if (++guard > 100000) throw SurgeryError("glue_sides: refinement does not terminate");
    Item& xa = A[ia];
    Item& xb = B[ib];
    if (xa.p0 != xb.p0) throw SurgeryError("glue_sides: parameter ranges misaligned");
    bool a_ray = !xa.p1.field();
    bool b_ray = !xb.p1.field();
    if (a_ray && b_ray) {
      out.push_back(glue_auto(xa.edge, xb.edge));
      ++ia;
      ++ib;
      continue;
    }
    if (a_ray) {
      Item tail = split_item(xa, xb.p1, true);
      A.insert(A.begin() + ia + 1, tail);
      continue;
    }
    if (b_ray) {
      Item tail = split_item(xb, xa.p1, false);
      B.insert(B.begin() + ib + 1, tail);
      continue;
    }
    if (xa.p1 == xb.p1) {
      out.push_back(glue_auto(xa.edge, xb.edge));
      ++ia;
      ++ib;
    } else if (xa.p1 < xb.p1) {
      Item tail = split_item(xb, xa.p1, false);
      B.insert(B.begin() + ib + 1, tail);
    } else {
      Item tail = split_item(xa, xb.p1, true);
      A.insert(A.begin() + ia + 1, tail);
    }
  }
  if (ia != A.size() || ib != B.size())
    throw SurgeryError("glue_sides: sides have different extents");
  return out;
}

void SurfaceBuilder::close_slit(const OpenSlit& s) {
  glue_sides(s.left, s.right, s.is_ray ? s.ray_dir : s.vec);
}

}  // namespace holonomy
