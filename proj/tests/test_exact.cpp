#include <random>

#include "doctest.h"
#include "holonomy/field.hpp"

using namespace holonomy;

namespace {

Scalar rand_scalar(const FieldPtr& f, std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-8, 8);
  std::uniform_int_distribution<int> den(1, 5);
  std::vector<Rational> c;
  for (int i = 0; i < f->degree(); ++i) c.push_back(Rational(num(rng), den(rng)));
  return Scalar(f, std::move(c));
}

}  // namespace

TEST_CASE("rational basics") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(3, -6) == Rational(-1, 2));
  CHECK(Rational::parse("-7/3").str() == "-7/3");
  CHECK(Rational::parse("5").str() == "5");
  CHECK_THROWS(Rational::parse("1/0"));
  CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
}

TEST_CASE("field construction validates the minimal polynomial") {
  // x^2 - 1 reducible
  CHECK_THROWS(FieldSpec(Poly({Rational(-1), Rational(0), Rational(1)}), Rational(0),
                         Rational(2)));
  // x^2 - 2 with an interval containing no root
  CHECK_THROWS(FieldSpec(Poly({Rational(-2), Rational(0), Rational(1)}), Rational(2),
                         Rational(3)));
  // x^2 - 2 with an interval containing both roots
  CHECK_THROWS(FieldSpec(Poly({Rational(-2), Rational(0), Rational(1)}), Rational(-2),
                         Rational(2)));
  // not monic
  CHECK_THROWS(FieldSpec(Poly({Rational(-2), Rational(0), Rational(2)}), Rational(1),
                         Rational(2)));
}

TEST_CASE("scalar arithmetic in Q(sqrt2)") {
  FieldPtr f = FieldSpec::sqrt2();
  Scalar one = Scalar::one(f);
  Scalar a = Scalar::alpha(f);

  // (1 + a)(1 - a) = 1 - a^2 = -1
  CHECK((one + a) * (one - a) == -one);
  // additive identity
  Scalar x = Scalar(f, {Rational(3, 7), Rational(-2, 5)});
  CHECK(Scalar::zero(f) + x == x);
  // inverse of (1 + sqrt2) is sqrt2 - 1
  Scalar inv = (one + a).inverse();
  CHECK(inv == a - one);
  CHECK(inv * (one + a) == one);
  CHECK_THROWS(Scalar::zero(f).inverse());
}

TEST_CASE("field mismatch is detected") {
  Scalar a = Scalar::one(FieldSpec::sqrt2());
  Scalar b = Scalar::one(FieldSpec::rationals());
  CHECK_THROWS_AS((void)(a + b), FieldMismatch);
}

TEST_CASE("sign determination") {
  FieldPtr f = FieldSpec::sqrt2();
  Scalar a = Scalar::alpha(f);
  CHECK(Scalar::zero(f).sign() == 0);
  CHECK((a - Scalar::one(f)).sign() == 1);
  // continued-fraction convergents of sqrt2 force deep interval refinement:
  // 665857/470832 approaches from above (value ~ +7.5e-7), 275807/195025 from
  // below (~ -1.8e-6); both checked against exact squaring:
  //   665857^2 - 2*470832^2 = +1 and 275807^2 - 2*195025^2 = -1.
  Scalar above = Scalar::of(f, Rational(665857)) - a * Rational(470832);
  CHECK(above.sign() == 1);
  Scalar below = Scalar::of(f, Rational(275807)) - a * Rational(195025);
  CHECK(below.sign() == -1);
  CHECK(Rational(665857) * Rational(665857) - Rational(2) * Rational(470832) * Rational(470832)
        == Rational(1));
  CHECK(Rational(275807) * Rational(275807) - Rational(2) * Rational(195025) * Rational(195025)
        == Rational(-1));
}

TEST_CASE("scalar field axioms on random triples") {
  FieldPtr f = FieldSpec::sqrt2();
  std::mt19937 rng(20240811);
  for (int t = 0; t < 50; ++t) {
    Scalar a = rand_scalar(f, rng), b = rand_scalar(f, rng), c = rand_scalar(f, rng);
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(((a * b).sign()) == a.sign() * b.sign());
    if (!b.is_zero()) CHECK((a / b) * b == a);
  }
}

TEST_CASE("degree four field built by Kronecker fallback") {
  // minimal polynomial of sqrt2 + sqrt3: x^4 - 10x^2 + 1 (reducible mod every prime)
  Poly p({Rational(1), Rational(0), Rational(-10), Rational(0), Rational(1)});
  auto f = std::make_shared<FieldSpec>(p, Rational(3), Rational(4));
  Scalar a = Scalar::alpha(f);
  // (a^2 - 5)^2 = 24, and a > 3
  Scalar s = a * a - Scalar::of(f, Rational(5));
  CHECK(s * s == Scalar::of(f, Rational(24)));
  CHECK((a - Scalar::of(f, Rational(3))).sign() == 1);
  CHECK((a - Scalar::of(f, Rational(4))).sign() == -1);
}

TEST_CASE("lattice detection") {
  FieldPtr f = FieldSpec::sqrt2();
  auto C = [&](long re, long im) { return ExactComplex::of(f, Rational(re), Rational(im)); };
  ExactComplex alpha(Scalar::alpha(f), Scalar::zero(f));

  SUBCASE("standard square lattice") {
    auto r = lattice_detect({C(1, 0), C(0, 1)});
    REQUIRE(r.kind == LatticeResult::Kind::Lattice);
    CHECK(r.area == Scalar::one(f));
  }
  SUBCASE("collinear irrational ratio is dense") {
    auto r = lattice_detect({C(1, 0), alpha});
    CHECK(r.kind == LatticeResult::Kind::Dense);
  }
  SUBCASE("redundant generators reduce to a rank-2 basis") {
    std::vector<ExactComplex> gens{C(2, 2), C(1, 1), C(0, 3)};
    auto r = lattice_detect(gens);
    REQUIRE(r.kind == LatticeResult::Kind::Lattice);
    CHECK(r.area == Scalar::of(f, Rational(3)));
    // both directions of the span identity
    for (const auto& g : gens) CHECK(zspan_contains({r.e1, r.e2}, g));
    CHECK(zspan_contains(gens, r.e1));
    CHECK(zspan_contains(gens, r.e2));
  }
  SUBCASE("all zero generators are trivial") {
    auto r = lattice_detect({C(0, 0), C(0, 0)});
    CHECK(r.kind == LatticeResult::Kind::Trivial);
  }
  SUBCASE("rank one") {
    auto r = lattice_detect({C(2, 4), C(3, 6), C(1, 2)});
    REQUIRE(r.kind == LatticeResult::Kind::RankOne);
    CHECK(r.e1 == C(1, 2));
  }
  SUBCASE("rank above two is dense") {
    auto r = lattice_detect({C(1, 0), C(0, 1), alpha});
    CHECK(r.kind == LatticeResult::Kind::Dense);
  }
  SUBCASE("invariance under permutation and negation") {
    std::vector<ExactComplex> gens{C(2, 2), C(1, 1), C(0, 3)};
    auto base = lattice_detect(gens);
    std::vector<ExactComplex> shuffled{-gens[2], gens[0], -gens[1]};
    auto r = lattice_detect(shuffled);
    CHECK(r.kind == base.kind);
    CHECK(r.e1 == base.e1);
    CHECK(r.e2 == base.e2);
  }
}

TEST_CASE("ratio helpers") {
  FieldPtr f = FieldSpec::sqrt2();
  auto C = [&](long re, long im) { return ExactComplex::of(f, Rational(re), Rational(im)); };
  ExactComplex a = C(2, 1);
  CHECK(rational_ratio(a, a * Rational(-3, 2)) == Rational(-3, 2));
  ExactComplex b = a * Scalar::alpha(f);
  CHECK(!rational_ratio(a, b).has_value());
  CHECK(parallel(a, b));
  CHECK(!same_direction(a, -a));
  CHECK(same_direction(a, a * Rational(5)));
}
