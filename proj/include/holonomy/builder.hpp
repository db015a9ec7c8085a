#pragma once

#include <functional>
#include <map>
#include <set>

#include "holonomy/complex.hpp"

namespace holonomy {

struct SurgeryError : std::runtime_error {
  explicit SurgeryError(const std::string& m) : std::runtime_error(m) {}
};
struct SlitNotEmbedded : SurgeryError {
  explicit SlitNotEmbedded(const std::string& m) : SurgeryError("SlitNotEmbedded: " + m) {}
};
struct MarkingConflict : SurgeryError {
  explicit MarkingConflict(const std::string& m) : SurgeryError("MarkingConflict: " + m) {}
};

// Mutable surgery substrate with stable piece/edge/gluing ids.  Marked paths,
// punctured corners and end labels are maintained through every cut.
class SurfaceBuilder {
 public:
  using PieceId = int;
  using EdgeId = int;
  using GluingId = int;

  explicit SurfaceBuilder(FieldPtr field);
  explicit SurfaceBuilder(const MarkedSurface& ms);

  const FieldPtr& field() const { return field_; }

  // --- assembly ---
  PieceId add_piece(const Piece& p);
  GluingId glue(EdgeId a, EdgeId b, const ExactComplex& translation);
  // convenience: derive the translation from the edge geometry
  GluingId glue_auto(EdgeId a, EdgeId b);

  EdgeId boundary_edge(PieceId p, int position) const;
  int boundary_size(PieceId p) const;
  const Piece& piece(PieceId p) const;
  Edge edge_geom(EdgeId e) const;
  PieceId piece_of(EdgeId e) const;
  bool is_glued(EdgeId e) const;
  GluingId gluing_of(EdgeId e) const;
  ExactComplex gluing_translation(GluingId g) const;
  std::pair<EdgeId, EdgeId> gluing_edges(GluingId g) const;

  // --- marked data ---
  void set_marking(const std::string& name, CrossingPath path);
  const std::map<std::string, CrossingPath>& markings() const { return marking_; }
  CrossingPath& marking(const std::string& name) { return marking_.at(name); }
  void puncture(PieceId p, int corner);
  ExactComplex marking_holonomy(const std::string& name) const;

  // --- corners ---
  struct Corner {
    PieceId piece;
    int corner;
  };
  // registers a corner that is kept up to date through cuts; returns a slot
  int track_corner(PieceId p, int corner);
  Corner tracked(int slot) const;
  ExactComplex corner_pos(const Corner& c) const;
  // Vertex class of a corner, walking glued identifications.
  std::vector<Corner> vertex_class(const Corner& c) const;
  // Total cone angle (in half-turns) of the class.
  int class_halfturns(const Corner& c) const;
  // true when the direction u points strictly inside the corner's sector.
  bool sector_contains(const Corner& c, const ExactComplex& u) const;
  // A corner of the class whose sector strictly contains u, after `turns`
  // full 2*pi rotations beyond the first such sector.
  Corner class_corner_toward(const Corner& c, const ExactComplex& u, int turns) const;

  // --- slits ---
  // One side of an opened slit: edge ids ordered by developed parameter,
  // together with the developed parameter bounds of each edge (scaled so the
  // full slit is [0, 1] for segments, or [0, inf) for rays).
  struct SlitSide {
    std::vector<EdgeId> edges;
    std::vector<std::pair<Scalar, Scalar>> params;  // matching edges
  };
  struct OpenSlit {
    SlitSide left;   // piece interiors on the left of the slit vector
    SlitSide right;  // ... on the right
    ExactComplex base_dev;  // developed position of the slit start (in the
                            // coordinates of the starting piece)
    ExactComplex vec;       // developed slit vector (zero for rays)
    ExactComplex ray_dir;   // for ray slits: direction
    bool is_ray = false;
  };

  // Anchor of a slit start: either a corner (sector chosen by direction) or
  // an interior point of a piece.
  struct Anchor {
    bool at_corner = false;
    Corner corner{};          // when at_corner
    PieceId piece = -1;       // when interior
    ExactComplex point;       // interior point (piece coordinates)
  };
  static Anchor at_corner(PieceId p, int corner) {
    Anchor a;
    a.at_corner = true;
    a.corner = {p, corner};
    return a;
  }
  static Anchor at_point(PieceId p, ExactComplex q) {
    Anchor a;
    a.piece = p;
    a.point = std::move(q);
    return a;
  }

  // Cuts the surface open along the developed segment anchor -> anchor + c.
  // The slit interior must avoid singular vertices; marked paths must not
  // cross it.  Both sides are left unglued.
  OpenSlit slit_segment(const Anchor& start, const ExactComplex& c);

  // Cuts open along the infinite ray from the anchor in direction dir.  The
  // ray must eventually run straight into an end.
  OpenSlit slit_ray(const Anchor& start, const ExactComplex& dir);

  // Glues side A (left of its slit) to side B (right of its slit), refining
  // subdivisions to match.  `unit` is the common developed parameter unit
  // (the slit vector / ray direction used when the sides were recorded).
  // Sides must have equal parameter extent.  Returns the new gluing ids.
  std::vector<GluingId> glue_sides(const SlitSide& a, const SlitSide& b,
                                   const ExactComplex& unit);
  // As glue_sides, pairing A-parameter x with B-parameter x - offset.
  std::vector<GluingId> glue_sides_shifted(const SlitSide& a, const SlitSide& b,
                                           const ExactComplex& unit, const Scalar& offset);

  // Re-glues the two sides of one slit with each other (identity closure).
  void close_slit(const OpenSlit& s);

  // --- finishing ---
  MarkedSurface finalize() const;

  // end labels management (by audit end order of the finalized surface)
  void set_end_labels(std::vector<int> labels) { end_labels_ = std::move(labels); }
  std::vector<int>& end_labels() { return end_labels_; }

  void log(std::string line) { plan_.push_back(std::move(line)); }
  std::vector<std::string>& plan() { return plan_; }

  // true when p descends from any of the given root pieces (or is one)
  bool in_lineage(const std::vector<PieceId>& roots, PieceId p) const;

  // pieces reachable from `seed` through live gluings
  std::vector<PieceId> flood(PieceId seed) const;
  // removes the pieces and all gluings between them; gluings to outside
  // pieces must have been removed already.  Marked paths touching the dead
  // region raise MarkingConflict.
  void kill_pieces(const std::vector<PieceId>& dead);
  std::vector<PieceId> alive_pieces() const;
  // final (post-compaction) index of a live piece
  int final_piece_id(PieceId p) const;
  bool piece_alive(PieceId p) const { return pieces_.at(p).alive; }

  // Subdivides the edge (and its partner) at an interior point; returns the
  // two sub-edges in boundary order.
  std::pair<EdgeId, EdgeId> split_edge(EdgeId e, const ExactComplex& point);

  struct VertexHit : SurgeryError {
    VertexHit() : SurgeryError("trace_loop: path runs through a vertex") {}
  };

  // Follows the closed geodesic polyline from `start` with the given leg
  // displacements (which must sum to the loop's holonomy) and returns the
  // crossing sequence.  Throws VertexHit when a leg meets a corner and
  // SurgeryError when the polyline does not close up.
  CrossingPath trace_loop(PieceId start_hint, const ExactComplex& start,
                          const std::vector<ExactComplex>& legs) const;

 private:
  struct BPiece {
    bool alive = false;
    Piece geom;
    std::vector<EdgeId> edge_ids;  // parallel to geom edge order
  };
  struct BGluing {
    bool alive = false;
    EdgeId a = -1, b = -1;
    ExactComplex t;
  };

  FieldPtr field_;
  std::vector<BPiece> pieces_;
  std::map<EdgeId, std::pair<PieceId, int>> edge_loc_;
  std::vector<BGluing> gluings_;
  std::map<EdgeId, GluingId> edge_gluing_;
  int next_edge_ = 0;
  std::map<PieceId, std::vector<PieceId>> lineage_;  // piece -> fragments
  std::map<std::string, CrossingPath> marking_;
  std::vector<std::pair<PieceId, int>> punctured_;
  std::vector<std::pair<PieceId, int>> tracked_;
  std::vector<int> end_labels_;
  std::vector<std::string> plan_;

  EdgeId fresh_edge() { return next_edge_++; }
  void set_edges(PieceId p, std::vector<EdgeId> ids);
  void reindex(PieceId p);
  void replace_path_gluing(GluingId old_g, GluingId new_g);
  void path_insert_connectors(PieceId old_piece, PieceId left, PieceId right,
                              const std::vector<GluingId>& connectors);
  void remap_corner_refs(PieceId p, const std::function<std::pair<PieceId, int>(int)>& f);

  // splits an edge of a piece locally (no partner handling)
  std::pair<EdgeId, EdgeId> split_edge_local(EdgeId e, const ExactComplex& point);

  // cut a piece along the chord between two of its corners; returns
  // (left piece, right piece, left chord edge, right chord edge) where left
  // is the side left of corner_p -> corner_q.
  struct ChordCut {
    PieceId left_piece, right_piece;
    EdgeId left_edge, right_edge;
  };
  ChordCut cut_chord(PieceId p, int corner_p, int corner_q);

  // resolve a piece hint through recorded splits to the live fragment
  // containing the point (coordinates are shared along the lineage)
  PieceId resolve_fragment(PieceId hint, const ExactComplex& q) const;

  // ensure points q (and avoid) of piece p lie in the "finite zone":
  // possibly splits half-planes/strips; returns the piece containing q.
  PieceId clip_unbounded(PieceId p, const ExactComplex& q, const ExactComplex& avoid);

  // cut a half-strip along the interior ray from a chain corner parallel
  // to its walls; returns the new unglued (left, right) ray edges, left
  // meaning left of the ray direction.
  std::pair<EdgeId, EdgeId> split_strip_ray(PieceId p, int corner);

  friend struct TraceOps;
};

}  // namespace holonomy
