#include "holonomy/complex.hpp"

#include <algorithm>
#include <sstream>

namespace holonomy {

void StratumSpec::normalize() {
  std::sort(zero_orders.begin(), zero_orders.end(), std::greater<int>());
  std::sort(pole_orders.begin(), pole_orders.end(), std::greater<int>());
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& i : issues) os << i.code << ": " << i.detail << "\n";
  return os.str();
}

namespace {

bool edges_glue(const Edge& ea, const Edge& eb, const ExactComplex& t) {
  // translate(ea, t) must equal reverse(eb)
  if (ea.kind == Edge::Kind::Segment && eb.kind == Edge::Kind::Segment)
    return ea.a + t == eb.b && ea.b + t == eb.a;
  if (ea.kind == Edge::Kind::RayOut && eb.kind == Edge::Kind::RayIn)
    return ea.a + t == eb.a && same_direction(ea.dir, eb.dir);
  if (ea.kind == Edge::Kind::RayIn && eb.kind == Edge::Kind::RayOut)
    return ea.a + t == eb.a && same_direction(ea.dir, eb.dir);
  return false;
}

std::string edge_str(const EdgeRef& e) {
  return "piece " + std::to_string(e.piece) + " edge " + std::to_string(e.edge);
}

}  // namespace

ValidationReport validate_complex(const PieceComplex& c) {
  ValidationReport rep;
  for (size_t i = 0; i < c.pieces.size(); ++i) {
    try {
      c.pieces[i].validate();
    } catch (const std::exception& e) {
      rep.fail("BadPiece", "piece " + std::to_string(i) + ": " + e.what());
    }
  }
  if (!rep.ok) return rep;

  std::vector<std::vector<int>> used(c.pieces.size());
  for (size_t i = 0; i < c.pieces.size(); ++i)
    used[i].assign(c.pieces[i].edge_count(), -1);

  for (size_t gi = 0; gi < c.gluings.size(); ++gi) {
    const Gluing& g = c.gluings[gi];
    auto in_range = [&](const EdgeRef& e) {
      return e.piece >= 0 && e.piece < static_cast<int>(c.pieces.size()) && e.edge >= 0 &&
             e.edge < c.pieces[e.piece].edge_count();
    };
    if (!in_range(g.a) || !in_range(g.b)) {
      rep.fail("BadGluing", "gluing " + std::to_string(gi) + " references a missing edge");
      continue;
    }
    for (const EdgeRef& e : {g.a, g.b}) {
      if (used[e.piece][e.edge] >= 0)
        rep.fail("UnpairedEdge", edge_str(e) + " participates in more than one gluing");
      used[e.piece][e.edge] = static_cast<int>(gi);
    }
    if (g.a == g.b) {
      rep.fail("MismatchedGluing", "gluing " + std::to_string(gi) + " glues an edge to itself");
      continue;
    }
    Edge ea = c.pieces[g.a.piece].edge(g.a.edge);
    Edge eb = c.pieces[g.b.piece].edge(g.b.edge);
    if (!edges_glue(ea, eb, g.translation))
      rep.fail("MismatchedGluing", "gluing " + std::to_string(gi) + " (" + edge_str(g.a) +
                                       " ~ " + edge_str(g.b) + "): geometry mismatch");
  }
  for (size_t i = 0; i < used.size(); ++i)
    for (size_t j = 0; j < used[i].size(); ++j)
      if (used[i][j] < 0)
        rep.fail("UnpairedEdge", edge_str({static_cast<int>(i), static_cast<int>(j)}) +
                                     " is not glued");
  if (!rep.ok) return rep;

  // connectivity over pieces via gluings
  if (!c.pieces.empty()) {
    std::vector<int> comp(c.pieces.size(), -1);
    std::vector<int> stack{0};
    comp[0] = 0;
    while (!stack.empty()) {
      int p = stack.back();
      stack.pop_back();
      for (const Gluing& g : c.gluings) {
        int q = -1;
        if (g.a.piece == p) q = g.b.piece;
        else if (g.b.piece == p) q = g.a.piece;
        if (q >= 0 && comp[q] < 0) {
          comp[q] = 0;
          stack.push_back(q);
        }
      }
    }
    for (size_t i = 0; i < comp.size(); ++i)
      if (comp[i] < 0) {
        rep.fail("Disconnected", "piece " + std::to_string(i) + " unreachable");
        break;
      }
  }

  // punctured corners must be valid references
  for (const CornerRef& pc : c.punctured_corners) {
    if (pc.piece < 0 || pc.piece >= static_cast<int>(c.pieces.size()) || pc.corner < 0 ||
        pc.corner >= c.pieces[pc.piece].corner_count())
      rep.fail("BadPuncture", "punctured corner out of range");
  }
  return rep;
}

ExactComplex compute_holonomy(const PieceComplex& c, const CrossingPath& path) {
  if (c.pieces.empty()) throw BrokenPath("empty complex");
  FieldPtr f = c.pieces[0].chain[0].field();
  ExactComplex h = ExactComplex::zero(f);
  if (path.empty()) return h;
  auto from_piece = [&](const Crossing& x) {
    const Gluing& g = c.gluings.at(x.gluing);
    return x.sign > 0 ? g.a.piece : g.b.piece;
  };
  auto to_piece = [&](const Crossing& x) {
    const Gluing& g = c.gluings.at(x.gluing);
    return x.sign > 0 ? g.b.piece : g.a.piece;
  };
  for (size_t i = 0; i < path.size(); ++i) {
    const Crossing& x = path[i];
    if (x.gluing < 0 || x.gluing >= static_cast<int>(c.gluings.size()))
      throw BrokenPath("crossing references missing gluing");
    if (x.sign != 1 && x.sign != -1) throw BrokenPath("crossing sign must be +-1");
    const Crossing& next = path[(i + 1) % path.size()];
    if (to_piece(x) != from_piece(next))
      throw BrokenPath("consecutive crossings do not share a piece");
    const Gluing& g = c.gluings[x.gluing];
    // crossing from the a side to the b side continues the developing map by
    // -translation (the gluing sends a-coordinates to b-coordinates by +t)
    h += x.sign > 0 ? -g.translation : g.translation;
  }
  return h;
}

std::vector<int> AuditResult::zero_orders() const {
  std::vector<int> z;
  for (const auto& v : vertex_classes)
    if (!v.punctured && v.order() >= 1) z.push_back(v.order());
  std::sort(z.begin(), z.end(), std::greater<int>());
  return z;
}

std::vector<int> AuditResult::pole_orders() const {
  std::vector<int> p;
  for (const auto& e : ends)
    if (e.at_infinity) p.push_back(e.pole_order);
  std::sort(p.begin(), p.end(), std::greater<int>());
  return p;
}

int AuditResult::class_of(const CornerRef& c) const {
  for (size_t i = 0; i < vertex_classes.size(); ++i)
    for (const CornerRef& r : vertex_classes[i].corners)
      if (r == c) return static_cast<int>(i);
  return -1;
}

}  // namespace holonomy
