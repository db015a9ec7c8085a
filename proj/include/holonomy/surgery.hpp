#pragma once

#include <optional>

#include "holonomy/builder.hpp"

namespace holonomy {

// A geodesic slit on a surface: a segment (vec != 0) or an infinite ray
// (ray_dir != 0), anchored at a corner or at an interior point of the hinted
// piece.
struct SlitSpec {
  int piece = -1;
  bool at_corner = false;
  int corner = -1;         // when at_corner
  ExactComplex start;      // interior anchor point (when !at_corner)
  ExactComplex vec;        // segment slit vector
  ExactComplex ray_dir;    // ray slit direction
  bool is_ray() const { return !ray_dir.is_zero(); }
};

struct SlitSite {
  int surface = 0;  // index into the surfaces vector
  SlitSpec slit;
};

// Optional handle inserted at the junction of a (single-site) slit chain:
// a parallelogram spanned by the slit vector and a derived side, marked with
// the two generator names so that the new handle holonomies are (alpha, beta)
// with beta equal to the common slit vector.
struct HandleInsert {
  ExactComplex alpha, beta;
  std::string alpha_name = "a1", beta_name = "b1";
};

struct SlitVectorMismatch : SurgeryError {
  SlitVectorMismatch() : SurgeryError("SlitVectorMismatch: slits must share one vector") {}
};
struct RayDirectionMismatch : SurgeryError {
  RayDirectionMismatch() : SurgeryError("RayDirectionMismatch: rays must be parallel") {}
};

// Sequential slit construction: opens every slit (all with the same developed
// vector) and glues the right side of slit i to the left side of slit i+1,
// cyclically.  With a handle insert (single site only) the parallelogram is
// spliced into the cycle and its second side pair is identified.
MarkedSurface sequential_slit_glue(const std::vector<MarkedSurface>& surfaces,
                                   const std::vector<SlitSite>& sites,
                                   const std::optional<HandleInsert>& handle = std::nullopt);

// Slit both surfaces along parallel rays running into their ends and glue
// crosswise.
MarkedSurface ray_slit_glue(const MarkedSurface& s1, const SlitSpec& r1,
                            const MarkedSurface& s2, const SlitSpec& r2);

// Split the zero at the given corner's vertex class (of order d1 + d2) into
// zeros of orders d1 and d2 joined by a saddle connection with developed
// image c (pointing into the anchor corner's sector).  A zero part may be 0
// only when allow_marked_point is set (the "marked point" variant).
MarkedSurface split_zero(const MarkedSurface& s, const CornerRef& zero, int d1, int d2,
                         const ExactComplex& c, bool allow_marked_point = false);

struct HandleSpec {
  enum class Mode { Trivial, SlitPair, ParallelogramInterior, ParallelogramExterior };
  Mode mode;
  ExactComplex a, b;  // prescribed holonomies of the new generators
  // anchor: a singular vertex class (Trivial) or a slit placement
  bool anchor_at_corner = false;
  CornerRef anchor_corner;
  int anchor_piece = -1;
  ExactComplex anchor_point;
  std::string alpha_name = "a1", beta_name = "b1";
};

struct VolumeSignMismatch : SurgeryError {
  explicit VolumeSignMismatch(const std::string& m) : SurgeryError("VolumeSignMismatch: " + m) {}
};
struct AnchorNotSingular : SurgeryError {
  AnchorNotSingular() : SurgeryError("AnchorNotSingular: trivial handles need a zero anchor") {}
};

MarkedSurface add_handle(const MarkedSurface& s, const HandleSpec& spec);

// Replaces every removable (finite) puncture by gluing in a plane cone, so
// that each end becomes a pole of order >= 1.
MarkedSurface complete_surface(const MarkedSurface& s);

struct ResidueMismatch : SurgeryError {
  ResidueMismatch() : SurgeryError("ResidueMismatch: cylinder circumferences differ") {}
};
struct NotSimpleEnd : SurgeryError {
  NotSimpleEnd() : SurgeryError("NotSimpleEnd: end is not a simple-pole cylinder") {}
};

// Truncates the two simple-pole cylinder ends (with opposite residues) and
// glues the resulting circles; end1/end2 index into the surfaces' audit ends.
MarkedSurface truncate_glue_cylinders(const MarkedSurface& s1, int end1,
                                      const MarkedSurface& s2, int end2);

// --- helpers shared with the realization pipelines ---

// Disjoint union of marked surfaces in one complex (marking names must be
// disjoint); piece indices of surface k are offset by the returned vector.
MarkedSurface disjoint_union(const std::vector<MarkedSurface>& surfaces,
                             std::vector<int>* piece_offsets = nullptr);

// The standard plane (C, dz) built from two half-planes whose seam runs
// through `through` with direction `dir`.
MarkedSurface plane_surface(const FieldPtr& f, const ExactComplex& through,
                            const ExactComplex& dir);

// The cone (C, z^k dz): 2(k+1) half-planes; the apex sits at `apex` and the
// seam rays run in direction `dir`.
MarkedSurface cone_surface(const FieldPtr& f, int k, const ExactComplex& apex,
                           const ExactComplex& dir);

}  // namespace holonomy
