#pragma once

#include <vector>

#include "holonomy/field.hpp"

namespace holonomy {

enum class PieceKind { Polygon, HalfStrip, HalfPlane };

// Boundary edge of a piece, oriented counterclockwise (interior on the left).
struct Edge {
  enum class Kind { Segment, RayIn, RayOut };
  Kind kind;
  ExactComplex a;    // Segment: start.  RayIn/RayOut: the finite base point.
  ExactComplex b;    // Segment: end (unused for rays).
  ExactComplex dir;  // Rays: direction toward infinity (unused for segments).

  // Traversal direction along the boundary at the finite end(s): a RayIn is
  // traversed from infinity toward its base, so its traversal direction is
  // -dir; a RayOut is traversed outward (+dir).
  ExactComplex travel() const {
    switch (kind) {
      case Kind::Segment: return b - a;
      case Kind::RayIn: return -dir;
      case Kind::RayOut: return dir;
    }
    throw std::logic_error("unreachable");
  }
  bool is_ray() const { return kind != Kind::Segment; }
};

// A convex Euclidean piece.
//
// All three kinds share one representation: a chain of finite boundary
// vertices in counterclockwise order plus, for unbounded kinds, a ray
// direction.
//   Polygon   — chain has >= 3 vertices; edges are the cyclic segments.
//   HalfStrip — boundary is RayIn(chain.front(), ray_dir), the chain
//               segments, RayOut(chain.back(), ray_dir); the two rays are
//               parallel.
//   HalfPlane — chain lies on one line with CCW traversal direction ray_dir;
//               boundary is RayIn(chain.front(), -ray_dir), the chain
//               segments, RayOut(chain.back(), ray_dir).
//
// Chains may contain straight (angle pi) vertices: these are subdivision
// points introduced by gluings and surgeries.
struct Piece {
  PieceKind kind;
  std::vector<ExactComplex> chain;
  ExactComplex ray_dir;  // unused for Polygon

  int edge_count() const;
  Edge edge(int i) const;
  int corner_count() const { return static_cast<int>(chain.size()); }
  // Corner i sits at chain[i]; incoming/outgoing boundary edges around it.
  int incoming_edge(int corner) const;
  int outgoing_edge(int corner) const;
  // Start/end corner of edge i, or -1 for the missing end of a ray.
  int edge_start_corner(int i) const;
  int edge_end_corner(int i) const;

  // Throws std::invalid_argument when the piece is malformed (orientation,
  // convexity, degenerate edges, ray constraints).
  void validate() const;
};

Piece make_polygon(std::vector<ExactComplex> chain);
Piece make_half_strip(std::vector<ExactComplex> chain, ExactComplex dir);
Piece make_half_plane(std::vector<ExactComplex> chain, ExactComplex travel_dir);

enum class Region { Interior, Boundary, Outside };

Region locate_point(const Piece& p, const ExactComplex& x);

// Where the ray x + t*u (t > 0) first leaves the piece, assuming x is inside
// or on the boundary with u pointing weakly inward; returns the exit
// parameter. Returns false when the ray stays inside forever (unbounded
// pieces).
bool ray_exit(const Piece& p, const ExactComplex& x, const ExactComplex& u, Scalar& t_exit);

}  // namespace holonomy
