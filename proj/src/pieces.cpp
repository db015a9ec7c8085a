#include "holonomy/pieces.hpp"

namespace holonomy {

int Piece::edge_count() const {
  int m = static_cast<int>(chain.size());
  return kind == PieceKind::Polygon ? m : m + 1;
}

Edge Piece::edge(int i) const {
  int m = static_cast<int>(chain.size());
  if (kind == PieceKind::Polygon) {
    return Edge{Edge::Kind::Segment, chain[i], chain[(i + 1) % m], ExactComplex()};
  }
  if (i == 0) {
    ExactComplex d = kind == PieceKind::HalfStrip ? ray_dir : -ray_dir;
    return Edge{Edge::Kind::RayIn, chain.front(), ExactComplex(), d};
  }
  if (i == m) return Edge{Edge::Kind::RayOut, chain.back(), ExactComplex(), ray_dir};
  return Edge{Edge::Kind::Segment, chain[i - 1], chain[i], ExactComplex()};
}

int Piece::incoming_edge(int corner) const {
  int m = static_cast<int>(chain.size());
  if (kind == PieceKind::Polygon) return (corner + m - 1) % m;
  return corner;
}

int Piece::outgoing_edge(int corner) const {
  if (kind == PieceKind::Polygon) return corner;
  return corner + 1;
}

int Piece::edge_start_corner(int i) const {
  if (kind == PieceKind::Polygon) return i;
  return i == 0 ? -1 : i - 1;
}

int Piece::edge_end_corner(int i) const {
  int m = static_cast<int>(chain.size());
  if (kind == PieceKind::Polygon) return (i + 1) % m;
  return i == m ? -1 : i;
}

namespace {

// turning at a corner: from incoming travel u to outgoing travel w; convexity
// needs cross(u, w) >= 0 and forbids u, w anti-parallel (interior angle 0).
void check_corner(const ExactComplex& u, const ExactComplex& w, const char* what) {
  Scalar c = cross(u, w);
  int s = c.sign();
  if (s < 0) throw std::invalid_argument(std::string(what) + ": reflex or clockwise corner");
  if (s == 0 && dot(u, w).sign() < 0)
    throw std::invalid_argument(std::string(what) + ": zero interior angle");
}

}  // namespace

void Piece::validate() const {
  int m = static_cast<int>(chain.size());
  auto req = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  switch (kind) {
    case PieceKind::Polygon: {
      req(m >= 3, "polygon: needs at least 3 vertices");
      bool positive = false;
      for (int i = 0; i < m; ++i) {
        ExactComplex u = chain[(i + 1) % m] - chain[i];
        req(!u.is_zero(), "polygon: zero-length edge");
        ExactComplex w = chain[(i + 2) % m] - chain[(i + 1) % m];
        check_corner(u, w, "polygon");
        if (cross(u, w).sign() > 0) positive = true;
      }
      req(positive, "polygon: degenerate (zero area)");
      break;
    }
    case PieceKind::HalfStrip: {
      req(m >= 2, "half-strip: needs at least 2 chain vertices");
      req(!ray_dir.is_zero(), "half-strip: zero ray direction");
      for (int i = 0; i + 1 < m; ++i)
        req(!(chain[i + 1] - chain[i]).is_zero(), "half-strip: zero-length edge");
      check_corner(-ray_dir, chain[1] - chain[0], "half-strip");
      for (int i = 0; i + 2 < m; ++i)
        check_corner(chain[i + 1] - chain[i], chain[i + 2] - chain[i + 1], "half-strip");
      check_corner(chain[m - 1] - chain[m - 2], ray_dir, "half-strip");
      // the rays must point into the half-plane left of the base
      Scalar advance = cross(chain.back() - chain.front(), ray_dir);
      req(advance.sign() > 0, "half-strip: chain does not separate the rays");
      break;
    }
    case PieceKind::HalfPlane: {
      req(m >= 1, "half-plane: needs at least 1 boundary vertex");
      req(!ray_dir.is_zero(), "half-plane: zero travel direction");
      for (int i = 0; i + 1 < m; ++i) {
        ExactComplex u = chain[i + 1] - chain[i];
        req(!u.is_zero(), "half-plane: zero-length edge");
        req(cross(ray_dir, u).is_zero() && dot(ray_dir, u).sign() > 0,
            "half-plane: chain not along the boundary line");
      }
      break;
    }
  }
}

Piece make_polygon(std::vector<ExactComplex> chain) {
  Piece p{PieceKind::Polygon, std::move(chain), ExactComplex()};
  if (!p.chain.empty()) p.ray_dir = ExactComplex::zero(p.chain[0].field());
  p.validate();
  return p;
}

Piece make_half_strip(std::vector<ExactComplex> chain, ExactComplex dir) {
  Piece p{PieceKind::HalfStrip, std::move(chain), std::move(dir)};
  p.validate();
  return p;
}

Piece make_half_plane(std::vector<ExactComplex> chain, ExactComplex travel_dir) {
  Piece p{PieceKind::HalfPlane, std::move(chain), std::move(travel_dir)};
  p.validate();
  return p;
}

Region locate_point(const Piece& p, const ExactComplex& x) {
  bool on_boundary = false;
  const int ec = p.edge_count();
  for (int i = 0; i < ec; ++i) {
    Edge e = p.edge(i);
    const ExactComplex& base = e.a;
    ExactComplex u = e.kind == Edge::Kind::Segment ? e.b - e.a : e.dir;
    // interior lies to the left of the traversal; a RayIn is traversed
    // against dir, so flip its side test
    int side = cross(u, x - base).sign();
    int oriented = e.kind == Edge::Kind::RayIn ? -side : side;
    if (oriented < 0) return Region::Outside;
    if (side == 0) {
      Scalar t = dot(u, x - base);
      bool within;
      if (e.kind == Edge::Kind::Segment)
        within = t.sign() >= 0 && (t - u.norm2()).sign() <= 0;
      else
        within = t.sign() >= 0;
      if (within) on_boundary = true;
    }
  }
  return on_boundary ? Region::Boundary : Region::Interior;
}

bool ray_exit(const Piece& p, const ExactComplex& x, const ExactComplex& u, Scalar& t_exit) {
  bool found = false;
  const int ec = p.edge_count();
  for (int i = 0; i < ec; ++i) {
    Edge e = p.edge(i);
    const ExactComplex& base = e.a;
    ExactComplex w = e.kind == Edge::Kind::Segment ? e.b - e.a : e.dir;
    Scalar denom = cross(u, w);
    if (denom.is_zero()) continue;
    // solve x + t u = base + s w
    Scalar t = cross(base - x, w) / denom;
    if (t.sign() <= 0) continue;
    ExactComplex hit = x + u * t;
    Scalar s = dot(w, hit - base);
    bool within;
    if (e.kind == Edge::Kind::Segment)
      within = s.sign() >= 0 && (s - w.norm2()).sign() <= 0;
    else
      within = s.sign() >= 0;
    if (!within) continue;
    if (!found || t < t_exit) {
      t_exit = t;
      found = true;
    }
  }
  return found;
}

}  // namespace holonomy
