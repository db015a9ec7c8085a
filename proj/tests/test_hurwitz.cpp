#include "doctest.h"
#include "holonomy/hurwitz.hpp"

using namespace holonomy;

TEST_CASE("datum validation") {
  BranchDatum d{0, 2, {{2}, {2}}};
  CHECK(validate_datum(d).ok);
  BranchDatum bad{0, 2, {{2}}};
  CHECK(!validate_datum(bad).ok);
  BranchDatum ex128{0, 6, {{5, 1}, {3, 1, 1, 1}, {5, 1}}};
  CHECK(validate_datum(ex128).ok);
  BranchDatum torus{1, 3, {{3}, {3}, {3}}};
  CHECK(validate_datum(torus).ok);
  BranchDatum no_branch{0, 3, {{3}, {1, 1, 1}, {3}}};
  CHECK(!validate_datum(no_branch).ok);
}

TEST_CASE("permutation helpers") {
  Perm p{1, 2, 0, 3};
  CHECK(cycle_type(p) == std::vector<int>{3, 1});
  CHECK(compose(p, inverse(p)) == Perm{0, 1, 2, 3});
  CHECK(minimal_representative({3, 1}, 4) == Perm{0, 2, 3, 1});
  CHECK(minimal_representative({2, 2}, 4) == Perm{1, 0, 3, 2});
  CHECK(is_transitive({Perm{1, 2, 0}}, 3));
  CHECK(!is_transitive({Perm{1, 0, 2}}, 3));
}

TEST_CASE("brute force witnesses and refutations") {
  // double cover of the sphere
  auto w1 = brute_force_realize({0, 2, {{2}, {2}}});
  REQUIRE(w1.has_value());
  CHECK(w1->permutations[0] == Perm{1, 0});
  CHECK(w1->permutations[1] == Perm{1, 0});
  // torus cover
  auto w2 = brute_force_realize({1, 3, {{3}, {3}, {3}}});
  REQUIRE(w2.has_value());
  Perm prod = compose(compose(w2->permutations[0], w2->permutations[1]), w2->permutations[2]);
  CHECK(prod == Perm{0, 1, 2});
  CHECK(is_transitive(w2->permutations, 3));
  // the classical non-realizable datum
  auto w3 = brute_force_realize({0, 4, {{2, 2}, {2, 2}, {3, 1}}});
  CHECK(!w3.has_value());
  // Example with degree 6: realizable
  auto w4 = brute_force_realize({0, 6, {{5, 1}, {3, 1, 1, 1}, {5, 1}}});
  CHECK(w4.has_value());
  CHECK_THROWS_AS(brute_force_realize({4, 9, {{9}, {9}, {9}}}), DegreeTooLarge);
  // determinism: repeat runs give identical witnesses
  auto w5 = brute_force_realize({1, 3, {{3}, {3}, {3}}});
  CHECK(w5->permutations == w2->permutations);
}

TEST_CASE("pullback of the unit cylinder") {
  FieldPtr f = FieldSpec::sqrt2();
  SUBCASE("identity tuple is the cylinder") {
    MonodromyTuple t;
    MarkedSurface ms = surface_from_monodromy(t, 1, -1, -1, f);
    AuditResult a = audit_surface(ms.complex);
    CHECK(a.genus == 0);
    CHECK(a.pole_orders() == std::vector<int>{1, 1});
    CHECK(a.zero_orders().empty());
  }
  SUBCASE("double cover branched at two points") {
    MonodromyTuple t{{Perm{1, 0}, Perm{1, 0}, Perm{1, 0}, Perm{1, 0}}};
    MarkedSurface ms = surface_from_monodromy(t, 2, 0, 3, f);
    AuditResult a = audit_surface(ms.complex);
    CHECK(a.genus == 1);
    CHECK(a.pole_orders() == std::vector<int>{1, 1});
    CHECK(a.zero_orders() == std::vector<int>{1, 1});
    SurfaceDatum sd = datum_from_surface(ms);
    CHECK(sd.lambda == std::vector<int>{2});
    CHECK(sd.mu == std::vector<int>{2});
  }
  SUBCASE("torus from the (3)(3)(3) witness") {
    auto w = brute_force_realize({1, 3, {{3}, {3}, {3}}});
    REQUIRE(w.has_value());
    MarkedSurface ms = surface_from_monodromy(*w, 3, 0, 2, f);
    AuditResult a = audit_surface(ms.complex);
    CHECK(a.genus == 1);
    CHECK(a.pole_orders() == std::vector<int>{1, 1});
    // degree identity: one zero of order 2 over the single interior value
    CHECK(a.zero_orders() == std::vector<int>{2});
    SurfaceDatum sd = datum_from_surface(ms);
    CHECK(sd.lambda == std::vector<int>{3});
    CHECK(sd.mu == std::vector<int>{3});
    // round trip: the datum matches the input up to reordering
    BranchDatum expect{1, 3, {{3}, {3}, {3}}};
    expect.normalize();
    CHECK(sd.datum == expect);
    // and the datum is again realizable
    CHECK(brute_force_realize(sd.datum).has_value());
  }
}

TEST_CASE("round trips at small degree") {
  FieldPtr f = FieldSpec::sqrt2();
  std::vector<BranchDatum> data{
      {0, 2, {{2}, {2}}},
      {0, 3, {{2, 1}, {3}, {2, 1}}},
      {0, 4, {{2, 1, 1}, {2, 1, 1}, {2, 1, 1}, {2, 1, 1}, {2, 1, 1}, {2, 1, 1}}},
      {1, 4, {{4}, {2, 1, 1}, {2, 1, 1}, {4}}},
  };
  for (BranchDatum d : data) {
    REQUIRE(validate_datum(d).ok);
    auto w = brute_force_realize(d);
    if (!w) continue;
    // choose plus/minus fibers: the first and the last partitions
    MarkedSurface ms =
        surface_from_monodromy(*w, d.degree, 0, static_cast<int>(d.partitions.size()) - 1, f);
    SurfaceDatum sd = datum_from_surface(ms);
    BranchDatum expect = d;
    expect.normalize();
    CHECK(sd.datum == expect);
    CHECK(validate_datum(sd.datum).ok);
  }
}
