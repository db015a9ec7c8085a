#include "doctest.h"
#include "holonomy/complex.hpp"

using namespace holonomy;

namespace {

FieldPtr F() { return FieldSpec::sqrt2(); }

ExactComplex C(long re, long im) { return ExactComplex::of(F(), Rational(re), Rational(im)); }

// unit square with opposite sides glued: the flat torus
PieceComplex flat_torus() {
  PieceComplex c;
  c.pieces.push_back(make_polygon({C(0, 0), C(1, 0), C(1, 1), C(0, 1)}));
  c.gluings.push_back({{0, 0}, {0, 2}, C(0, 1)});   // bottom ~ top
  c.gluings.push_back({{0, 1}, {0, 3}, C(-1, 0)});  // right ~ left
  return c;
}

// the plane (C, dz) as two half-planes glued along two boundary rays
PieceComplex plane() {
  PieceComplex c;
  c.pieces.push_back(make_half_plane({C(0, 0)}, C(1, 0)));   // upper
  c.pieces.push_back(make_half_plane({C(0, 0)}, C(-1, 0)));  // lower
  c.gluings.push_back({{1, 1}, {0, 0}, C(0, 0)});  // negative axis
  c.gluings.push_back({{0, 1}, {1, 0}, C(0, 0)});  // positive axis
  return c;
}

// bi-infinite cylinder C/<z -> z+w> with w = 2
PieceComplex cylinder() {
  PieceComplex c;
  c.pieces.push_back(make_half_strip({C(0, 0), C(2, 0)}, C(0, 1)));   // upper
  c.pieces.push_back(make_half_strip({C(2, 0), C(0, 0)}, C(0, -1)));  // lower
  c.gluings.push_back({{0, 1}, {1, 1}, C(0, 0)});   // shared base
  c.gluings.push_back({{0, 2}, {0, 0}, C(-2, 0)});  // upper walls
  c.gluings.push_back({{1, 2}, {1, 0}, C(2, 0)});   // lower walls
  return c;
}

// two copies of (C, dz) glued along parallel rays: (C, z dz)
PieceComplex two_planes_ray_glued() {
  PieceComplex c;
  c.pieces.push_back(make_half_plane({C(0, 0)}, C(1, 0)));   // 0: upper 1
  c.pieces.push_back(make_half_plane({C(0, 0)}, C(-1, 0)));  // 1: lower 1
  c.pieces.push_back(make_half_plane({C(0, 0)}, C(1, 0)));   // 2: upper 2
  c.pieces.push_back(make_half_plane({C(0, 0)}, C(-1, 0)));  // 3: lower 2
  c.gluings.push_back({{1, 1}, {0, 0}, C(0, 0)});  // plane 1 negative axis
  c.gluings.push_back({{3, 1}, {2, 0}, C(0, 0)});  // plane 2 negative axis
  c.gluings.push_back({{0, 1}, {3, 0}, C(0, 0)});  // cross: upper1 -> lower2
  c.gluings.push_back({{2, 1}, {1, 0}, C(0, 0)});  // cross: upper2 -> lower1
  return c;
}

}  // namespace

TEST_CASE("plane validates and audits") {
  PieceComplex c = plane();
  CHECK(validate_complex(c).ok);
  AuditResult a = audit_surface(c);
  CHECK(a.genus == 0);
  CHECK(a.zero_orders().empty());
  REQUIRE(a.ends.size() == 1);
  CHECK(a.ends[0].pole_order == 2);
  CHECK(a.ends[0].residue_period.is_zero());
  CHECK(a.complete);
}

TEST_CASE("flat torus validates and audits") {
  PieceComplex c = flat_torus();
  CHECK(validate_complex(c).ok);
  AuditResult a = audit_surface(c);
  CHECK(a.genus == 1);
  CHECK(a.puncture_count == 0);
  REQUIRE(a.vertex_classes.size() == 1);
  CHECK(a.vertex_classes[0].cone_halfturns == 2);  // regular point
  CHECK(a.zero_orders().empty());
}

TEST_CASE("mismatched gluing is reported") {
  PieceComplex c;
  c.pieces.push_back(make_polygon({C(0, 0), C(1, 0), C(1, 1), C(0, 1)}));
  // bottom (length 1) to a side of length... pretend top glues with wrong shift
  c.gluings.push_back({{0, 0}, {0, 2}, C(5, 1)});
  c.gluings.push_back({{0, 1}, {0, 3}, C(-1, 0)});
  ValidationReport rep = validate_complex(c);
  CHECK(!rep.ok);
  bool mismatched = false;
  for (auto& i : rep.issues) mismatched |= i.code == "MismatchedGluing";
  CHECK(mismatched);
}

TEST_CASE("holonomy of torus loops") {
  PieceComplex c = flat_torus();
  // loop crossing the vertical gluing (right wall, a-side) once: dz integral 1
  CrossingPath horizontal{{1, 1}};
  CHECK(compute_holonomy(c, horizontal) == C(1, 0));
  CrossingPath vertical{{0, 1}};
  CHECK(compute_holonomy(c, vertical) == C(0, -1));
  CHECK(compute_holonomy(c, {}).is_zero());
  // concatenation = sum; reversal = negation
  CrossingPath both{{1, 1}, {0, 1}};
  CHECK(compute_holonomy(c, both) == C(1, -1));
  CrossingPath rev{{0, -1}, {1, -1}};
  CHECK(compute_holonomy(c, rev) == C(-1, 1));
}

TEST_CASE("cylinder ends carry opposite residues") {
  PieceComplex c = cylinder();
  CHECK(validate_complex(c).ok);
  AuditResult a = audit_surface(c);
  CHECK(a.genus == 0);
  REQUIRE(a.ends.size() == 2);
  CHECK(a.ends[0].pole_order == 1);
  CHECK(a.ends[1].pole_order == 1);
  ExactComplex sum = a.ends[0].residue_period + a.ends[1].residue_period;
  CHECK(sum.is_zero());
  CHECK((a.ends[0].residue_period == C(2, 0) || a.ends[0].residue_period == C(-2, 0)));
  // loop holonomy equals the audited residue for both ends
  for (const auto& e : a.ends) CHECK(compute_holonomy(c, e.loop) == e.residue_period);
}

TEST_CASE("two ray-glued planes form (C, z dz)") {
  PieceComplex c = two_planes_ray_glued();
  CHECK(validate_complex(c).ok);
  AuditResult a = audit_surface(c);
  CHECK(a.genus == 0);
  CHECK(a.zero_orders() == std::vector<int>{1});
  REQUIRE(a.ends.size() == 1);
  CHECK(a.ends[0].pole_order == 3);
  CHECK(a.ends[0].residue_period.is_zero());
}

TEST_CASE("punctured torus vertex is a removable end") {
  PieceComplex c = flat_torus();
  c.punctured_corners.push_back({0, 0});
  AuditResult a = audit_surface(c);
  CHECK(!a.complete);
  CHECK(a.puncture_count == 1);
  REQUIRE(a.ends.size() == 1);
  CHECK(!a.ends[0].at_infinity);
  CHECK(a.ends[0].removable_order == 0);
  CHECK(compute_holonomy(c, a.ends[0].loop).is_zero());
}

TEST_CASE("audits are invariant under global translation and relabeling") {
  PieceComplex c = two_planes_ray_glued();
  AuditResult base = audit_surface(c);
  // translate all pieces by 3 - i (gluing translations are unchanged)
  PieceComplex t = c;
  for (Piece& p : t.pieces)
    for (ExactComplex& v : p.chain) v += C(3, -1);
  AuditResult moved = audit_surface(t);
  CHECK(moved.genus == base.genus);
  CHECK(moved.zero_orders() == base.zero_orders());
  CHECK(moved.pole_orders() == base.pole_orders());
  // relabel pieces by a rotation
  PieceComplex r;
  int n = static_cast<int>(c.pieces.size());
  auto rl = [&](int p) { return (p + 1) % n; };
  r.pieces.resize(n);
  for (int i = 0; i < n; ++i) r.pieces[rl(i)] = c.pieces[i];
  for (const Gluing& g : c.gluings)
    r.gluings.push_back({{rl(g.a.piece), g.a.edge}, {rl(g.b.piece), g.b.edge}, g.translation});
  AuditResult rel = audit_surface(r);
  CHECK(rel.genus == base.genus);
  CHECK(rel.zero_orders() == base.zero_orders());
  CHECK(rel.pole_orders() == base.pole_orders());
}
