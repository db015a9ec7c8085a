#include <algorithm>
#include <map>

#include "holonomy/complex.hpp"

namespace holonomy {

namespace {

struct CornerId {
  int piece, corner;
};

// Upper half-plane membership of a direction vector: arg in [0, pi).
bool upper(const ExactComplex& v) {
  int s = v.im().sign();
  if (s > 0) return true;
  if (s < 0) return false;
  return v.re().sign() > 0;
}

}  // namespace

AuditResult audit_surface(const PieceComplex& c) {
  ValidationReport rep = validate_complex(c);
  if (!rep.ok) throw AuditError("audit_surface: complex invalid:\n" + rep.summary());
  AuditResult res;
  if (c.pieces.empty()) throw AuditError("audit_surface: empty complex");
  FieldPtr f = c.pieces[0].chain[0].field();

  // --- edge -> gluing lookup ---
  std::map<std::pair<int, int>, std::pair<int, bool>> side;  // edge -> (gluing, is_a)
  for (size_t gi = 0; gi < c.gluings.size(); ++gi) {
    const Gluing& g = c.gluings[gi];
    side[{g.a.piece, g.a.edge}] = {static_cast<int>(gi), true};
    side[{g.b.piece, g.b.edge}] = {static_cast<int>(gi), false};
  }

  // --- vertex classes by walking around each corner ---
  // next(corner) = start corner of the partner of the incoming edge.
  auto next_corner = [&](const CornerId& cur) -> CornerId {
    const Piece& p = c.pieces[cur.piece];
    int ie = p.incoming_edge(cur.corner);
    auto it = side.find({cur.piece, ie});
    const Gluing& g = c.gluings[it->second.first];
    EdgeRef partner = it->second.second ? g.b : g.a;
    int sc = c.pieces[partner.piece].edge_start_corner(partner.edge);
    if (sc < 0) throw AuditError("audit_surface: ray glued to a segment");
    return {partner.piece, sc};
  };

  std::map<std::pair<int, int>, int> corner_class;
  for (size_t pi = 0; pi < c.pieces.size(); ++pi) {
    const Piece& p = c.pieces[pi];
    for (int ci = 0; ci < p.corner_count(); ++ci) {
      if (corner_class.count({static_cast<int>(pi), ci})) continue;
      // walk the class
      VertexClassInfo info;
      ExactComplex r = ExactComplex::of(f, Rational(1), Rational(0));
      int halfturns = 0;
      CornerId start{static_cast<int>(pi), ci};
      CornerId cur = start;
      do {
        corner_class[{cur.piece, cur.corner}] = static_cast<int>(res.vertex_classes.size());
        info.corners.push_back({cur.piece, cur.corner});
        const Piece& pc = c.pieces[cur.piece];
        Edge ein = pc.edge(pc.incoming_edge(cur.corner));
        Edge eout = pc.edge(pc.outgoing_edge(cur.corner));
        ExactComplex rev_in = -ein.travel();
        ExactComplex out = eout.travel();
        // corner rotation z = rev_in * conj(out): arg in (0, pi]
        ExactComplex z = rev_in * out.conj();
        ExactComplex w = r * z;
        if (!upper(w)) ++halfturns;
        r = upper(w) ? w : -w;
        cur = next_corner(cur);
        size_t total_corners = 0;
        for (const Piece& q : c.pieces) total_corners += q.corner_count();
        if (info.corners.size() > total_corners)
          throw AuditError("audit_surface: vertex walk does not close");
      } while (!(cur.piece == start.piece && cur.corner == start.corner));
      if (!(r.im().is_zero() && r.re().sign() > 0) || halfturns % 2 != 0)
        throw AuditError("AngleClosureFailure: vertex walk winding is not a multiple of 2pi");
      if (halfturns < 2) throw AuditError("AngleClosureFailure: zero cone angle");
      info.cone_halfturns = halfturns;
      res.vertex_classes.push_back(std::move(info));
    }
  }

  // mark punctured classes
  std::vector<int> punctured_class;
  for (const CornerRef& pc : c.punctured_corners) {
    int cls = corner_class.at({pc.piece, pc.corner});
    if (res.vertex_classes[cls].punctured)
      throw AuditError("audit_surface: vertex class punctured twice");
    res.vertex_classes[cls].punctured = true;
    punctured_class.push_back(cls);
  }

  // --- ends at infinity ---
  std::vector<int> unbounded;
  for (size_t pi = 0; pi < c.pieces.size(); ++pi)
    if (c.pieces[pi].kind != PieceKind::Polygon) unbounded.push_back(static_cast<int>(pi));
  std::map<int, bool> piece_done;
  for (int pi : unbounded) piece_done[pi] = false;

  std::vector<EndInfo> inf_ends;
  for (int pi : unbounded) {
    if (piece_done[pi]) continue;
    EndInfo end;
    end.at_infinity = true;
    end.residue_period = ExactComplex::zero(f);
    int cur = pi;
    do {
      piece_done[cur] = true;
      if (c.pieces[cur].kind == PieceKind::HalfPlane) ++end.halfplane_count;
      // cross the gluing of this piece's RayIn (edge 0)
      auto it = side.find({cur, 0});
      const Gluing& g = c.gluings[it->second.first];
      bool is_a = it->second.second;
      end.ray_gluings.push_back(it->second.first);
      end.loop.push_back({it->second.first, is_a ? 1 : -1});
      end.residue_period += is_a ? g.translation : -g.translation;
      EdgeRef partner = is_a ? g.b : g.a;
      cur = partner.piece;
      if (c.pieces[cur].kind == PieceKind::Polygon)
        throw AuditError("EndClassificationFailure: ray glued into a bounded piece");
      if (end.ray_gluings.size() > c.gluings.size())
        throw AuditError("EndClassificationFailure: end walk does not close");
    } while (cur != pi);
    if (end.halfplane_count % 2 != 0)
      throw AuditError("EndClassificationFailure: odd number of half-plane sectors");
    if (end.halfplane_count == 0) {
      if (end.residue_period.is_zero())
        throw AuditError("EndClassificationFailure: cylinder end with zero residue");
      end.pole_order = 1;
    } else {
      end.pole_order = end.halfplane_count / 2 + 1;
    }
    // the walk direction gives the negatively oriented loop; reverse it
    std::reverse(end.loop.begin(), end.loop.end());
    for (Crossing& x : end.loop) x.sign = -x.sign;
    inf_ends.push_back(std::move(end));
  }
  std::sort(inf_ends.begin(), inf_ends.end(), [](const EndInfo& x, const EndInfo& y) {
    return *std::min_element(x.ray_gluings.begin(), x.ray_gluings.end()) <
           *std::min_element(y.ray_gluings.begin(), y.ray_gluings.end());
  });
  res.ends = std::move(inf_ends);

  // finite removable punctures, in punctured_corners order
  for (size_t k = 0; k < punctured_class.size(); ++k) {
    EndInfo end;
    end.at_infinity = false;
    end.vertex_class = punctured_class[k];
    end.removable_order = res.vertex_classes[punctured_class[k]].order();
    end.residue_period = ExactComplex::zero(f);
    // loop around the vertex: cross the incoming-edge gluing at each corner
    for (const CornerRef& cr : res.vertex_classes[punctured_class[k]].corners) {
      const Piece& p = c.pieces[cr.piece];
      auto it = side.find({cr.piece, p.incoming_edge(cr.corner)});
      end.loop.push_back({it->second.first, it->second.second ? 1 : -1});
    }
    res.ends.push_back(std::move(end));
  }

  // --- genus from the Euler characteristic of the compactification ---
  int V = static_cast<int>(res.vertex_classes.size());
  int n_inf = 0;
  for (const auto& e : res.ends)
    if (e.at_infinity) ++n_inf;
  V += n_inf;
  int E = static_cast<int>(c.gluings.size());
  int F = static_cast<int>(c.pieces.size());
  int chi = V - E + F;
  if (chi > 2 || (2 - chi) % 2 != 0)
    throw AuditError("audit_surface: impossible Euler characteristic");
  res.genus = (2 - chi) / 2;
  res.puncture_count = n_inf + static_cast<int>(punctured_class.size());
  res.complete = punctured_class.empty();

  // degree identity: sum of all finite cone orders - sum of pole orders = 2g-2
  long lhs = 0;
  for (const auto& v : res.vertex_classes) lhs += v.order();
  for (const auto& e : res.ends)
    if (e.at_infinity) lhs -= e.pole_order;
  if (lhs != 2L * res.genus - 2)
    throw AuditError("audit_surface: degree identity violated");
  return res;
}

}  // namespace holonomy
