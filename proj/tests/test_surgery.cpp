#include "doctest.h"
#include "holonomy/surgery.hpp"

using namespace holonomy;

namespace {

FieldPtr F() { return FieldSpec::sqrt2(); }
ExactComplex C(long re, long im) { return ExactComplex::of(F(), Rational(re), Rational(im)); }
ExactComplex Cq(Rational re, Rational im) {
  return ExactComplex(Scalar::of(F(), re), Scalar::of(F(), im));
}

MarkedSurface plane() { return plane_surface(F(), C(0, 0), C(1, 0)); }

SlitSpec seg_at(int piece, ExactComplex start, ExactComplex vec) {
  SlitSpec s;
  s.piece = piece;
  s.start = std::move(start);
  s.vec = std::move(vec);
  return s;
}

}  // namespace

TEST_CASE("two planes joined by unit slits") {
  MarkedSurface a = plane(), b = plane();
  std::vector<SlitSite> sites{{0, seg_at(0, C(0, 1), C(1, 0))},
                              {1, seg_at(0, C(0, 2), C(1, 0))}};
  MarkedSurface out = sequential_slit_glue({a, b}, sites);
  AuditResult res = audit_surface(out.complex);
  CHECK(res.genus == 0);
  CHECK(res.zero_orders() == std::vector<int>{1, 1});
  CHECK(res.pole_orders() == std::vector<int>{2, 2});
}

TEST_CASE("two slits on one plane add a handle") {
  MarkedSurface a = plane();
  std::vector<SlitSite> sites{{0, seg_at(0, C(0, 1), C(1, 0))},
                              {0, seg_at(0, C(0, 3), C(1, 0))}};
  MarkedSurface out = sequential_slit_glue({a}, sites);
  AuditResult res = audit_surface(out.complex);
  CHECK(res.genus == 1);
  CHECK(res.zero_orders() == std::vector<int>{1, 1});
  CHECK(res.pole_orders() == std::vector<int>{2});
}

TEST_CASE("ray slit glue merges pole ends") {
  MarkedSurface a = plane(), b = plane();
  SlitSpec r1, r2;
  r1.piece = 0;
  r1.at_corner = true;
  r1.corner = 0;
  r1.ray_dir = C(1, 0);
  r2 = r1;
  MarkedSurface out = ray_slit_glue(a, r1, b, r2);
  AuditResult res = audit_surface(out.complex);
  CHECK(res.genus == 0);
  CHECK(res.zero_orders() == std::vector<int>{1});
  CHECK(res.pole_orders() == std::vector<int>{3});
}

TEST_CASE("split a zero of order 4 into 2 + 2") {
  MarkedSurface cone = cone_surface(F(), 4, C(0, 0), C(1, 0));
  AuditResult before = audit_surface(cone.complex);
  REQUIRE(before.zero_orders() == std::vector<int>{4});
  CornerRef zero{0, 0};
  MarkedSurface out = split_zero(cone, zero, 2, 2, C(0, 1));
  AuditResult res = audit_surface(out.complex);
  CHECK(res.genus == 0);
  CHECK(res.zero_orders() == std::vector<int>{2, 2});
  CHECK(res.pole_orders() == std::vector<int>{6});
}

TEST_CASE("split a zero of order 2 into 1 + 1 preserving ends") {
  MarkedSurface cone = cone_surface(F(), 2, C(0, 0), C(1, 0));
  AuditResult before = audit_surface(cone.complex);
  MarkedSurface out = split_zero(cone, {0, 0}, 1, 1, Cq(Rational(1, 3), Rational(1, 5)));
  AuditResult res = audit_surface(out.complex);
  CHECK(res.zero_orders() == std::vector<int>{1, 1});
  CHECK(res.pole_orders() == before.pole_orders());
  REQUIRE(res.ends.size() == 1);
  CHECK(res.ends[0].residue_period == before.ends[0].residue_period);
  CHECK(res.ends[0].halfplane_count == before.ends[0].halfplane_count);
}

TEST_CASE("bad partition is rejected") {
  MarkedSurface cone = cone_surface(F(), 4, C(0, 0), C(1, 0));
  CHECK_THROWS(split_zero(cone, {0, 0}, 0, 4, C(0, 1)));
  CHECK_THROWS(split_zero(cone, {0, 0}, 1, 2, C(0, 1)));  // order mismatch
}

TEST_CASE("marked point variant moves structure without new zeros") {
  MarkedSurface cone = cone_surface(F(), 2, C(0, 0), C(1, 0));
  MarkedSurface out = split_zero(cone, {0, 0}, 2, 0, C(0, 1), true);
  AuditResult res = audit_surface(out.complex);
  CHECK(res.zero_orders() == std::vector<int>{2});
  CHECK(res.pole_orders() == std::vector<int>{4});
}

TEST_CASE("trivial handle on (C, z dz)") {
  MarkedSurface cone = cone_surface(F(), 1, C(0, 0), C(1, 0));
  HandleSpec spec;
  spec.mode = HandleSpec::Mode::Trivial;
  spec.a = C(0, 0);
  spec.b = C(0, 0);
  spec.anchor_at_corner = true;
  spec.anchor_corner = {0, 0};
  spec.alpha_name = "a1";
  spec.beta_name = "b1";
  MarkedSurface out = add_handle(cone, spec);
  AuditResult res = audit_surface(out.complex);
  CHECK(res.genus == 1);
  CHECK(res.zero_orders() == std::vector<int>{1, 1, 1});
  CHECK(res.pole_orders() == std::vector<int>{3});
  CHECK(compute_holonomy(out.complex, out.marking.at("a1")).is_zero());
  CHECK(compute_holonomy(out.complex, out.marking.at("b1")).is_zero());
}

TEST_CASE("elementary handle with zero beta") {
  HandleSpec spec;
  spec.mode = HandleSpec::Mode::SlitPair;
  spec.a = C(1, 0);
  spec.b = C(0, 0);
  spec.anchor_piece = 0;
  spec.anchor_point = C(0, 1);
  MarkedSurface out = add_handle(plane(), spec);
  AuditResult res = audit_surface(out.complex);
  CHECK(res.genus == 1);
  CHECK(res.zero_orders() == std::vector<int>{1, 1});
  CHECK(res.pole_orders() == std::vector<int>{2});
  CHECK(compute_holonomy(out.complex, out.marking.at("a1")) == C(1, 0));
  CHECK(compute_holonomy(out.complex, out.marking.at("b1")).is_zero());
}

TEST_CASE("collinear handle with positive ratio") {
  HandleSpec spec;
  spec.mode = HandleSpec::Mode::SlitPair;
  spec.a = C(1, 0);
  spec.b = Cq(Rational(1, 2), Rational(0));
  spec.anchor_piece = 0;
  spec.anchor_point = C(0, 1);
  MarkedSurface out = add_handle(plane(), spec);
  AuditResult res = audit_surface(out.complex);
  CHECK(res.genus == 1);
  CHECK(res.zero_orders() == std::vector<int>{2});
  CHECK(res.pole_orders() == std::vector<int>{2});
  CHECK(compute_holonomy(out.complex, out.marking.at("a1")) == spec.a);
  CHECK(compute_holonomy(out.complex, out.marking.at("b1")) == spec.b);
}

TEST_CASE("collinear handle with negative ratio") {
  HandleSpec spec;
  spec.mode = HandleSpec::Mode::SlitPair;
  spec.a = C(1, 0);
  spec.b = Cq(Rational(-3, 2), Rational(0));
  spec.anchor_piece = 0;
  spec.anchor_point = C(0, 1);
  MarkedSurface out = add_handle(plane(), spec);
  AuditResult res = audit_surface(out.complex);
  CHECK(res.genus == 1);
  CHECK(res.zero_orders() == std::vector<int>{2});
  CHECK(compute_holonomy(out.complex, out.marking.at("a1")) == spec.a);
  CHECK(compute_holonomy(out.complex, out.marking.at("b1")) == spec.b);
}

TEST_CASE("interior parallelogram handle realizes (1, i)") {
  HandleSpec spec;
  spec.mode = HandleSpec::Mode::ParallelogramInterior;
  spec.a = C(1, 0);
  spec.b = C(0, 1);
  spec.anchor_piece = 0;
  spec.anchor_point = C(0, 2);
  MarkedSurface out = add_handle(plane(), spec);
  AuditResult res = audit_surface(out.complex);
  CHECK(res.genus == 1);
  CHECK(res.zero_orders() == std::vector<int>{2});
  CHECK(res.pole_orders() == std::vector<int>{2});
  CHECK(compute_holonomy(out.complex, out.marking.at("a1")) == C(1, 0));
  CHECK(compute_holonomy(out.complex, out.marking.at("b1")) == C(0, 1));
}

TEST_CASE("surgery preserves pre-existing markings") {
  // cylinder with a marked core loop, then an interior handle in a free spot
  SurfaceBuilder b(F());
  int upS = b.add_piece(make_half_strip({C(0, 0), C(4, 0)}, C(0, 1)));
  int dnS = b.add_piece(make_half_strip({C(4, 0), C(0, 0)}, C(0, -1)));
  b.glue_auto(b.boundary_edge(upS, 1), b.boundary_edge(dnS, 1));
  b.glue_auto(b.boundary_edge(upS, 2), b.boundary_edge(upS, 0));
  b.glue_auto(b.boundary_edge(dnS, 2), b.boundary_edge(dnS, 0));
  b.set_marking("g1", b.trace_loop(upS, C(1, 1), {C(4, 0)}));
  MarkedSurface cyl = b.finalize();
  ExactComplex before = compute_holonomy(cyl.complex, cyl.marking.at("g1"));
  CHECK(before == C(4, 0));

  HandleSpec spec;
  spec.mode = HandleSpec::Mode::ParallelogramInterior;
  spec.a = C(1, 0);
  spec.b = Cq(Rational(0), Rational(1, 2));
  spec.anchor_piece = 0;
  spec.anchor_point = Cq(Rational(2), Rational(3));
  MarkedSurface out = add_handle(cyl, spec);
  CHECK(compute_holonomy(out.complex, out.marking.at("g1")) == before);
  AuditResult res = audit_surface(out.complex);
  CHECK(res.genus == 1);
}

TEST_CASE("exterior parallelogram handle realizes (i, 1)") {
  HandleSpec spec;
  spec.mode = HandleSpec::Mode::ParallelogramExterior;
  spec.a = C(0, 1);
  spec.b = C(1, 0);  // Im(conj(i) * 1) = -1 < 0
  spec.anchor_piece = 0;
  spec.anchor_point = C(0, 2);
  MarkedSurface out = add_handle(plane(), spec);
  AuditResult res = audit_surface(out.complex);
  CHECK(res.genus == 1);
  CHECK(res.zero_orders() == std::vector<int>{2});
  CHECK(res.pole_orders() == std::vector<int>{2});
  CHECK(compute_holonomy(out.complex, out.marking.at("a1")) == spec.a);
  CHECK(compute_holonomy(out.complex, out.marking.at("b1")) == spec.b);
}

TEST_CASE("completion turns a regular puncture into an order two pole") {
  // flat torus with a punctured vertex
  MarkedSurface ms;
  ms.complex.pieces.push_back(make_polygon({C(0, 0), C(1, 0), C(1, 1), C(0, 1)}));
  ms.complex.gluings.push_back({{0, 0}, {0, 2}, C(0, 1)});
  ms.complex.gluings.push_back({{0, 1}, {0, 3}, C(-1, 0)});
  ms.complex.punctured_corners.push_back({0, 0});
  AuditResult before = audit_surface(ms.complex);
  REQUIRE(!before.complete);
  // label the puncture with its loop so completion re-points it
  ms.marking["g1"] = before.ends[0].loop;
  MarkedSurface out = complete_surface(ms);
  AuditResult res = audit_surface(out.complex);
  CHECK(res.complete);
  CHECK(res.genus == 1);
  CHECK(res.pole_orders() == std::vector<int>{2});
  CHECK(res.zero_orders() == std::vector<int>{1, 1});
  CHECK(compute_holonomy(out.complex, out.marking.at("g1")).is_zero());
  CHECK(out.complex.punctured_corners.empty());
}

TEST_CASE("completion of a punctured zero gives order k+2") {
  // (C, z^2 dz) with the cone point punctured: completion gives a pole of 4
  MarkedSurface cone = cone_surface(F(), 2, C(0, 0), C(1, 0));
  cone.complex.punctured_corners.push_back({0, 0});
  MarkedSurface out = complete_surface(cone);
  AuditResult res = audit_surface(out.complex);
  CHECK(res.complete);
  CHECK(res.genus == 0);
  std::vector<int> poles = res.pole_orders();
  REQUIRE(poles.size() == 2);
  CHECK(poles == std::vector<int>{4, 4});
  // zeros: the filled cone point (2), the plug cone point (2), two simple
  CHECK(res.zero_orders() == std::vector<int>{2, 2, 1, 1});
}

TEST_CASE("already complete surfaces pass through unchanged") {
  MarkedSurface p = plane();
  MarkedSurface out = complete_surface(p);
  CHECK(out.complex.pieces.size() == p.complex.pieces.size());
}

TEST_CASE("truncate and glue two half-infinite cylinders") {
  auto make_cyl = [&](ExactComplex w) {
    SurfaceBuilder b(F());
    ExactComplex up = w.rot90();
    int upS = b.add_piece(make_half_strip({C(0, 0), w}, up));
    int dnS = b.add_piece(make_half_strip({w, C(0, 0)}, -up));
    b.glue_auto(b.boundary_edge(upS, 1), b.boundary_edge(dnS, 1));
    b.glue_auto(b.boundary_edge(upS, 2), b.boundary_edge(upS, 0));
    b.glue_auto(b.boundary_edge(dnS, 2), b.boundary_edge(dnS, 0));
    return b.finalize();
  };
  MarkedSurface c1 = make_cyl(C(1, 0));
  MarkedSurface c2 = make_cyl(C(1, 0));
  AuditResult a1 = audit_surface(c1.complex);
  // pick the ends with opposite residues
  int e1 = a1.ends[0].residue_period == C(1, 0) ? 0 : 1;
  int e2 = 1 - e1;
  MarkedSurface out = truncate_glue_cylinders(c1, e1, c2, e2);
  AuditResult res = audit_surface(out.complex);
  CHECK(res.genus == 0);
  CHECK(res.zero_orders().empty());
  CHECK(res.pole_orders() == std::vector<int>{1, 1});
  REQUIRE(res.ends.size() == 2);
  CHECK((res.ends[0].residue_period + res.ends[1].residue_period).is_zero());
}

TEST_CASE("truncation rejects mismatched circumferences") {
  auto make_cyl = [&](ExactComplex w) {
    SurfaceBuilder b(F());
    ExactComplex up = w.rot90();
    int upS = b.add_piece(make_half_strip({C(0, 0), w}, up));
    int dnS = b.add_piece(make_half_strip({w, C(0, 0)}, -up));
    b.glue_auto(b.boundary_edge(upS, 1), b.boundary_edge(dnS, 1));
    b.glue_auto(b.boundary_edge(upS, 2), b.boundary_edge(upS, 0));
    b.glue_auto(b.boundary_edge(dnS, 2), b.boundary_edge(dnS, 0));
    return b.finalize();
  };
  MarkedSurface c1 = make_cyl(C(1, 0));
  MarkedSurface c2 = make_cyl(C(2, 0));
  AuditResult a1 = audit_surface(c1.complex);
  AuditResult a2 = audit_surface(c2.complex);
  int e1 = a1.ends[0].residue_period == C(1, 0) ? 0 : 1;
  int e2 = a2.ends[0].residue_period == C(-2, 0) ? 0 : 1;
  CHECK_THROWS_AS(truncate_glue_cylinders(c1, e1, c2, e2), ResidueMismatch);
}
