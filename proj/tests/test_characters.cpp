#include <random>

#include "doctest.h"
#include "holonomy/characters.hpp"

using namespace holonomy;

namespace {

FieldPtr F() { return FieldSpec::sqrt2(); }
ExactComplex C(long re, long im) { return ExactComplex::of(F(), Rational(re), Rational(im)); }
ExactComplex Cq(Rational re, Rational im) {
  return ExactComplex(Scalar::of(F(), re), Scalar::of(F(), im));
}
ExactComplex root2() { return ExactComplex(Scalar::alpha(F()), Scalar::zero(F())); }

PeriodCharacter make_chi(std::vector<ExactComplex> a, std::vector<ExactComplex> b,
                         std::vector<ExactComplex> g) {
  PeriodCharacter chi;
  chi.field = F();
  chi.genus = static_cast<int>(a.size());
  chi.punctures = static_cast<int>(g.size());
  chi.alpha = std::move(a);
  chi.beta = std::move(b);
  chi.gamma = std::move(g);
  chi.validate();
  return chi;
}

}  // namespace

TEST_CASE("volume evaluation") {
  CHECK(volume(make_chi({C(1, 0)}, {C(0, 1)}, {})) == Scalar::one(F()));
  CHECK(volume(trivial_character(F(), 2, 1)).is_zero());
  // pairs (1, i) and (i, 1): 1 + (-1) = 0
  CHECK(volume(make_chi({C(1, 0), C(0, 1)}, {C(0, 1), C(1, 0)}, {})).is_zero());
}

TEST_CASE("split and classification") {
  PeriodCharacter chi = make_chi({C(0, 0)}, {C(0, 0)}, {C(1, 0), C(-1, 0)});
  auto [cg, cn] = split_character(chi);
  CHECK(volume(cg).is_zero());
  CHECK(classify_values(cg.all_values()).kind == CharacterClass::Kind::Trivial);

  // values in (1/2)Z: Rational with span 1/2
  auto cls = classify_values({Cq(Rational(1, 2), Rational(0)), C(1, 0),
                              Cq(Rational(-7, 2), Rational(0))});
  CHECK(cls.kind == CharacterClass::Kind::Rational);
  CHECK(cls.span == Cq(Rational(1, 2), Rational(0)));

  auto cls2 = classify_values({C(1, 0), root2()});
  CHECK(cls2.kind == CharacterClass::Kind::RSpanOnly);
  CHECK(cls2.span == C(1, 0));

  auto cls3 = classify_values({C(1, 0), C(0, 1)});
  CHECK(cls3.kind == CharacterClass::Kind::Generic);

  auto [c4, prof] = classify_character(make_chi({C(1, 0), C(0, 1)}, {C(0, 1), C(1, 0)}, {}));
  CHECK(prof.positive == 1);
  CHECK(prof.negative == 1);
  CHECK(prof.zero == 0);
  (void)c4;
}

TEST_CASE("haupt decision") {
  // g=2, values generating Z[i] with volume 1 -> LatticeDeficient
  PeriodCharacter low = make_chi({C(1, 0), C(0, 0)}, {C(0, 1), C(0, 0)}, {});
  HauptVerdict v1 = haupt_decide(low, 2);
  CHECK(!v1.realizable);
  CHECK(v1.reason == "LatticeDeficient");
  // two copies of (1, i): volume 2 = 2 * area
  PeriodCharacter ok = make_chi({C(1, 0), C(1, 0)}, {C(0, 1), C(0, 1)}, {});
  CHECK(haupt_decide(ok, 2).realizable);
  // g=1 with (1, sqrt2): not a lattice
  PeriodCharacter bad = make_chi({C(1, 0)}, {root2()}, {});
  HauptVerdict v3 = haupt_decide(bad, 1);
  CHECK(!v3.realizable);
  CHECK(v3.reason == "NotALattice");
  // nonpositive volume never realizable
  PeriodCharacter neg = make_chi({C(0, 1), C(1, 0)}, {C(1, 0), C(0, 1)}, {});
  CHECK(volume(neg).is_zero());
  CHECK(!haupt_decide(neg, 2).realizable);
  // dense image with positive volume is fine for g >= 2
  PeriodCharacter dense = make_chi({C(1, 0), root2()}, {C(0, 1), C(0, 1)}, {});
  CHECK(haupt_decide(dense, 2).realizable);
}

TEST_CASE("integral normalization") {
  // values {2/3, 1/2, -7/6}: scale 1/6, integers {4, 3, -7}
  PeriodCharacter chi =
      make_chi({Cq(Rational(2, 3), Rational(0))}, {Cq(Rational(1, 2), Rational(0))},
               {Cq(Rational(-7, 6), Rational(0)), Cq(Rational(7, 6), Rational(0))});
  auto [hat, scale] = normalize_integral(chi);
  CHECK(hat.alpha[0] == C(4, 0));
  CHECK(hat.beta[0] == C(3, 0));
  CHECK(hat.gamma[0] == C(-7, 0));
  CHECK(hat.alpha[0] * scale.re() == chi.alpha[0] * Scalar::one(F()));
  // already surjective integral: identity scale
  PeriodCharacter z = make_chi({C(1, 0)}, {C(2, 0)}, {});
  auto [hz, sz] = normalize_integral(z);
  CHECK(hz.alpha[0] == C(1, 0));
  CHECK(sz == C(1, 0));
  // {2, 4} normalizes to {1, 2}
  PeriodCharacter t = make_chi({C(2, 0)}, {C(4, 0)}, {});
  auto [ht, st] = normalize_integral(t);
  CHECK(ht.alpha[0] == C(1, 0));
  CHECK(ht.beta[0] == C(2, 0));
  CHECK(st == C(2, 0));
  CHECK_THROWS_AS(normalize_integral(make_chi({C(1, 0)}, {root2()}, {})), NotRational);
}

TEST_CASE("basis change application") {
  PeriodCharacter chi = make_chi({C(1, 0)}, {C(0, 1)}, {});
  BasisChange id = BasisChange::identity(1);
  PeriodCharacter same = apply_basis_change(chi, id);
  CHECK(same.alpha[0] == chi.alpha[0]);
  // Dehn twist beta -> beta + alpha
  BasisChange tw = BasisChange::identity(1);
  tw.matrix[1][0] = 1;
  PeriodCharacter t = apply_basis_change(chi, tw);
  CHECK(t.alpha[0] == C(1, 0));
  CHECK(t.beta[0] == C(1, 1));
  // non-symplectic rejected
  BasisChange bad = BasisChange::identity(1);
  bad.matrix[0][1] = 1;
  bad.matrix[1][0] = 1;
  CHECK_THROWS_AS(apply_basis_change(chi, bad), NotSymplectic);
  // puncture addition shifts a handle value by a gamma value
  PeriodCharacter chip = make_chi({C(1, 0)}, {C(0, 1)}, {C(2, 3), C(-2, -3)});
  BasisChange add = BasisChange::identity(1);
  add.puncture_additions[0] = {Integer(1), Integer(0)};
  PeriodCharacter shifted = apply_basis_change(chip, add);
  CHECK(shifted.alpha[0] == C(3, 3));
  // volume is symplectically invariant (no additions)
  std::mt19937 rng(7);
  for (int t2 = 0; t2 < 20; ++t2) {
    PeriodCharacter c2 = make_chi({C(rng() % 7 - 3, rng() % 7 - 3), C(rng() % 5, 1)},
                                  {C(rng() % 7 - 3, 2), C(1, rng() % 5)}, {});
    BasisChange bc = BasisChange::identity(2);
    bc.matrix[0][2] = 1;
    bc.matrix[3][1] = -1;  // paired transvection
    bc.check_symplectic();
    CHECK(volume(apply_basis_change(c2, bc)) == volume(c2));
  }
}

TEST_CASE("mcg normalize: handles to one") {
  PeriodCharacter chi = make_chi({C(2, 0)}, {C(3, 0)}, {C(1, 0), C(-1, 0)});
  auto [out, bc] = mcg_normalize(chi, McgMode::HandlesToOne);
  CHECK(out.alpha[0] == C(1, 0));
  CHECK(out.beta[0] == C(1, 0));
  PeriodCharacter redo = apply_basis_change(chi, bc);
  CHECK(redo.alpha[0] == out.alpha[0]);
  CHECK(redo.beta[0] == out.beta[0]);
  // genus two with awkward values
  PeriodCharacter chi2 =
      make_chi({C(6, 0), C(10, 0)}, {C(4, 0), C(15, 0)}, {C(3, 0), C(-3, 0)});
  auto [out2, bc2] = mcg_normalize(chi2, McgMode::HandlesToOne);
  for (int k = 0; k < 4; ++k) CHECK(out2.handle_value(k) == C(1, 0));
  (void)bc2;
}

TEST_CASE("mcg normalize: shrink irrational") {
  PeriodCharacter chi = make_chi({root2()}, {C(1, 0)}, {});
  Scalar eps = Scalar::of(F(), Rational(1, 10));
  auto [out, bc] = mcg_normalize(chi, McgMode::ShrinkIrrational, eps);
  CHECK(out.alpha[0].re().sign() > 0);
  CHECK(out.beta[0].re().sign() > 0);
  CHECK(out.alpha[0].re() < eps);
  CHECK(out.beta[0].re() < eps);
  CHECK(!rational_ratio(out.alpha[0], out.beta[0]).has_value());
  PeriodCharacter redo = apply_basis_change(chi, bc);
  CHECK(redo.alpha[0] == out.alpha[0]);
}

TEST_CASE("mcg normalize: nonzero handles") {
  PeriodCharacter chi =
      make_chi({C(1, 0), C(0, 0)}, {C(1, 0), C(0, 0)}, {});
  auto [out, bc] = mcg_normalize(chi, McgMode::NonzeroHandles);
  for (int k = 0; k < 4; ++k) CHECK(!out.handle_value(k).is_zero());
  PeriodCharacter redo = apply_basis_change(chi, bc);
  for (int k = 0; k < 4; ++k) CHECK(redo.handle_value(k) == out.handle_value(k));
}

TEST_CASE("mcg normalize: irrational ratios") {
  PeriodCharacter chi = make_chi({root2(), C(1, 0)}, {root2() * Rational(2), C(2, 0)},
                                 {C(1, 0), C(-1, 0)});
  auto [out, bc] = mcg_normalize(chi, McgMode::IrrationalRatios);
  for (int i = 0; i < 2; ++i) {
    CHECK(out.alpha[i].re().sign() > 0);
    CHECK(out.beta[i].re().sign() > 0);
    CHECK(!rational_ratio(out.alpha[i], out.beta[i]).has_value());
  }
  PeriodCharacter redo = apply_basis_change(chi, bc);
  for (int k = 0; k < 4; ++k) CHECK(redo.handle_value(k) == out.handle_value(k));
}

TEST_CASE("decide_stratum fixed rules") {
  // trivial, g=0, kappa=(2), nu=(2,2): order condition fails
  PeriodCharacter t1 = trivial_character(F(), 0, 2);
  StratumDecision d1 = decide_stratum(t1, {2}, {2, 2});
  CHECK(!d1.realizable);
  CHECK(d1.rule == "OrderCondition");
  // trivial, g=0, kappa=(4,3,3,1,1), nu=(3,5,3,3): realizable by Thm B
  PeriodCharacter t2 = trivial_character(F(), 0, 4);
  StratumDecision d2 = decide_stratum(t2, {4, 3, 3, 1, 1}, {3, 5, 3, 3});
  CHECK(d2.realizable);
  CHECK(d2.rule == "ThmB");
  // integral, g=1, lambda=(1), mu=(1), kappa=(1,1): Gcomb0 fails
  PeriodCharacter t3 = make_chi({C(1, 0)}, {C(1, 0)}, {C(1, 0), C(-1, 0)});
  StratumDecision d3 = decide_stratum(t3, {1, 1}, {1, 1});
  CHECK(!d3.realizable);
  CHECK(d3.rule == "Gcomb0");
  // same with lambda=(3), mu=(3), kappa=(2): single zero case realizable
  PeriodCharacter t4 = make_chi({C(1, 0)}, {C(1, 0)}, {C(3, 0), C(-3, 0)});
  StratumDecision d4 = decide_stratum(t4, {2}, {1, 1});
  CHECK(d4.realizable);
  CHECK(d4.rule == "ThmE");
  // trivial with a simple pole
  StratumDecision d5 = decide_stratum(trivial_character(F(), 0, 2), {0 + 1, 1}, {1, 3});
  CHECK(!d5.realizable);
  CHECK(d5.rule == "PoleOrderOne");
  // nontrivial with a zero-gamma simple pole
  PeriodCharacter t6 = make_chi({}, {}, {C(1, 0), C(-1, 0), C(0, 0)});
  StratumDecision d6 = decide_stratum(t6, {1}, {1, 1, 1});
  CHECK(!d6.realizable);
  CHECK(d6.rule == "SimplePoleResidue");
  // ThmC cases
  PeriodCharacter c_i = make_chi({C(1, 0)}, {C(1, 0)}, {C(0, 0)});
  CHECK(decide_stratum(c_i, {2}, {2}).rule == "ThmC_i");
  PeriodCharacter c_ii = make_chi({}, {}, {C(1, 0), C(-1, 0)});
  CHECK(decide_stratum(c_ii, {2}, {1, 3}).rule == "ThmC_ii");
  PeriodCharacter c_iii = make_chi({}, {}, {root2(), C(1, 0), -root2() - C(1, 0)});
  CHECK(decide_stratum(c_iii, {1}, {1, 1, 1}).rule == "ThmC_iii");
  PeriodCharacter c_iv = make_chi({root2()}, {C(1, 0)}, {C(1, 0), C(-1, 0)});
  CHECK(decide_stratum(c_iv, {1, 1}, {1, 1}).rule == "ThmC_iv");
  // scale invariance of the decision
  ExactComplex s = root2() + C(0, 2);
  StratumDecision ds = decide_stratum(t4.scaled(s), {2}, {1, 1});
  CHECK(ds.realizable == d4.realizable);
  CHECK(ds.rule == d4.rule);
  // degree identity violations throw
  CHECK_THROWS_AS(decide_stratum(t1, {1}, {2, 2}), BadStratum);
}
