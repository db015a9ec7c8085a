#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "holonomy/pieces.hpp"

namespace holonomy {

struct EdgeRef {
  int piece = -1;
  int edge = -1;
  friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
  friend auto operator<=>(const EdgeRef&, const EdgeRef&) = default;
};

struct CornerRef {
  int piece = -1;
  int corner = -1;
  friend bool operator==(const CornerRef&, const CornerRef&) = default;
  friend auto operator<=>(const CornerRef&, const CornerRef&) = default;
};

// Identification of edge a with edge b by z -> z + translation: the
// translated edge a coincides with edge b traversed backwards.
struct Gluing {
  EdgeRef a, b;
  ExactComplex translation;
};

// A closed combinatorial loop: ordered gluing crossings with directions.
// Crossing (g, +1) passes from the piece of edge a to the piece of edge b.
struct Crossing {
  int gluing = -1;
  int sign = 1;
  friend bool operator==(const Crossing&, const Crossing&) = default;
};
using CrossingPath = std::vector<Crossing>;

struct StratumSpec {
  std::vector<int> zero_orders;  // kappa, sorted descending
  std::vector<int> pole_orders;  // nu, sorted descending
  void normalize();
  friend bool operator==(const StratumSpec&, const StratumSpec&) = default;
};

struct PieceComplex {
  std::vector<Piece> pieces;
  std::vector<Gluing> gluings;
  // Finite punctures: vertex classes removed from the surface, named by one
  // representative corner each.
  std::vector<CornerRef> punctured_corners;
};

struct ValidationIssue {
  std::string code;  // MismatchedGluing, UnpairedEdge, Disconnected, ...
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  std::vector<ValidationIssue> issues;
  void fail(std::string code, std::string detail) {
    ok = false;
    issues.push_back({std::move(code), std::move(detail)});
  }
  std::string summary() const;
};

ValidationReport validate_complex(const PieceComplex& c);

struct BrokenPath : std::runtime_error {
  explicit BrokenPath(const std::string& m) : std::runtime_error("BrokenPath: " + m) {}
};

// Sum of signed gluing translations; checks combinatorial closedness.
ExactComplex compute_holonomy(const PieceComplex& c, const CrossingPath& path);

struct VertexClassInfo {
  std::vector<CornerRef> corners;
  int cone_halfturns = 0;  // total angle = halfturns * pi, always even
  int order() const { return cone_halfturns / 2 - 1; }
  bool punctured = false;
};

struct EndInfo {
  bool at_infinity = true;
  // at_infinity: cycle data
  std::vector<int> ray_gluings;       // gluings crossed by the end loop, in order
  int halfplane_count = 0;            // infinity angle = halfplane_count * pi
  int pole_order = 0;                 // >= 1
  ExactComplex residue_period;        // holonomy of the positively oriented loop
  CrossingPath loop;
  // finite removable puncture: index of the vertex class
  int vertex_class = -1;
  int removable_order = 0;  // zero order k >= 0 of the removable puncture
};

struct AuditError : std::runtime_error {
  explicit AuditError(const std::string& m) : std::runtime_error(m) {}
};

struct AuditResult {
  std::vector<VertexClassInfo> vertex_classes;
  std::vector<EndInfo> ends;  // infinity ends first (by min gluing id), then punctures
  int genus = 0;
  int puncture_count = 0;  // infinity ends + punctured vertex classes
  bool complete = false;   // no removable (finite) punctures
  std::vector<int> zero_orders() const;  // unpunctured classes with order >= 1, sorted desc
  std::vector<int> pole_orders() const;  // infinity ends, sorted desc
  // class index of a corner
  int class_of(const CornerRef& c) const;
};

// Requires validate_complex to pass; throws AuditError on angle-closure or
// end-classification failures.
AuditResult audit_surface(const PieceComplex& c);

struct MarkedSurface {
  PieceComplex complex;
  // generator names: a1..ag, b1..bg, g1..gn
  std::map<std::string, CrossingPath> marking;
  std::optional<StratumSpec> declared_stratum;
  // end_labels[j] = index (audit end order) of the end realizing puncture j+1
  std::vector<int> end_labels;
  // provenance: one record per surgery applied
  std::vector<std::string> plan;
};

struct RealizationCheck {
  bool pass = true;
  std::vector<std::string> failures;  // CharacterMismatch(x), StratumMismatch, ...
};

}  // namespace holonomy
