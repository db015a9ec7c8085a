#include "doctest.h"
#include "holonomy/realize.hpp"

using namespace holonomy;

namespace {

FieldPtr F() { return FieldSpec::sqrt2(); }
ExactComplex C(long re, long im) { return ExactComplex::of(F(), Rational(re), Rational(im)); }
ExactComplex root2() { return ExactComplex(Scalar::alpha(F()), Scalar::zero(F())); }

PeriodCharacter sphere_chi(std::vector<ExactComplex> g) {
  PeriodCharacter chi;
  chi.field = F();
  chi.genus = 0;
  chi.punctures = static_cast<int>(g.size());
  chi.gamma = std::move(g);
  chi.validate();
  return chi;
}

}  // namespace

TEST_CASE("sphere: single trivial puncture is the plane") {
  PeriodCharacter chi = sphere_chi({C(0, 0)});
  MarkedSurface ms = realize_sphere(chi);
  AuditResult a = audit_surface(ms.complex);
  CHECK(a.genus == 0);
  CHECK(a.pole_orders() == std::vector<int>{2});
  CHECK(a.zero_orders().empty());
  CHECK(verify_realization(ms, chi).pass);
}

TEST_CASE("sphere: generic three punctures") {
  PeriodCharacter chi = sphere_chi({C(1, 0), C(0, 1), C(-1, -1)});
  MarkedSurface ms = realize_sphere(chi);
  AuditResult a = audit_surface(ms.complex);
  CHECK(a.genus == 0);
  CHECK(a.zero_orders() == std::vector<int>{1});
  CHECK(a.pole_orders() == std::vector<int>{1, 1, 1});
  RealizationCheck chk = verify_realization(ms, chi);
  for (const std::string& fmsg : chk.failures) MESSAGE(fmsg);
  CHECK(chk.pass);
}

TEST_CASE("sphere: degenerate collinear punctures") {
  PeriodCharacter chi = sphere_chi({C(1, 0), C(1, 0), C(-2, 0)});
  MarkedSurface ms = realize_sphere(chi);
  AuditResult a = audit_surface(ms.complex);
  CHECK(a.genus == 0);
  std::vector<int> z = a.zero_orders();
  int total = 0;
  for (int x : z) total += x;
  CHECK(total == 1);
  CHECK(a.pole_orders() == std::vector<int>{1, 1, 1});
  CHECK(verify_realization(ms, chi).pass);
}

TEST_CASE("sphere: two punctures make a cylinder") {
  PeriodCharacter chi = sphere_chi({C(2, 1), C(-2, -1)});
  MarkedSurface ms = realize_sphere(chi);
  AuditResult a = audit_surface(ms.complex);
  CHECK(a.genus == 0);
  CHECK(a.pole_orders() == std::vector<int>{1, 1});
  CHECK(verify_realization(ms, chi).pass);
}

TEST_CASE("sphere: trivial values are completed punctures") {
  PeriodCharacter chi = sphere_chi({C(1, 0), C(0, 0), C(0, 1), C(-1, -1)});
  MarkedSurface ms = realize_sphere(chi);
  AuditResult a = audit_surface(ms.complex);
  CHECK(a.genus == 0);
  CHECK(a.complete);
  CHECK(a.puncture_count == 4);
  std::vector<int> p = a.pole_orders();
  CHECK(p == std::vector<int>{2, 1, 1, 1});
  CHECK(verify_realization(ms, chi).pass);
}

TEST_CASE("sphere: all punctures trivial") {
  PeriodCharacter chi = sphere_chi({C(0, 0), C(0, 0), C(0, 0)});
  MarkedSurface ms = realize_sphere(chi);
  AuditResult a = audit_surface(ms.complex);
  CHECK(a.genus == 0);
  CHECK(a.complete);
  CHECK(a.puncture_count == 3);
  CHECK(verify_realization(ms, chi).pass);
}

TEST_CASE("torus: all volume classes") {
  struct Case {
    ExactComplex a, b;
    std::vector<int> zeros, poles;
  };
  std::vector<Case> cases{
      {C(1, 0), C(0, 1), {2}, {2}},    // positive volume
      {C(0, 1), C(1, 0), {2}, {2}},    // negative volume
      {C(0, 0), C(0, 0), {1, 1, 1}, {3}},  // trivial
      {C(1, 0), C(0, 0), {1, 1}, {2}},     // elementary b = 0
      {C(0, 0), C(2, 1), {1, 1}, {2}},     // elementary a = 0
      {C(2, 0), C(3, 0), {2}, {2}},        // collinear rational
      {root2(), C(1, 0), {2}, {2}},        // collinear irrational
  };
  for (const Case& cs : cases) {
    PeriodCharacter chi;
    chi.field = F();
    chi.genus = 1;
    chi.punctures = 1;
    chi.alpha = {cs.a};
    chi.beta = {cs.b};
    chi.gamma = {C(0, 0)};
    MarkedSurface ms = realize_torus(chi);
    AuditResult a = audit_surface(ms.complex);
    CHECK(a.genus == 1);
    CHECK(a.zero_orders() == cs.zeros);
    CHECK(a.pole_orders() == cs.poles);
    RealizationCheck chk = verify_realization(ms, chi);
    for (const std::string& m : chk.failures) MESSAGE(m);
    CHECK(chk.pass);
  }
}

namespace {

PeriodCharacter general_chi(std::vector<ExactComplex> a, std::vector<ExactComplex> b,
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

void check_general(const PeriodCharacter& chi) {
  MarkedSurface ms = realize_general(chi);
  RealizationCheck chk = verify_realization(ms, chi);
  for (const std::string& m : chk.failures) MESSAGE(m);
  CHECK(chk.pass);
  AuditResult a = audit_surface(ms.complex);
  CHECK(a.complete);
  CHECK(a.genus == chi.genus);
  CHECK(a.puncture_count == chi.punctures);
  for (const EndInfo& e : a.ends) CHECK(e.pole_order >= 1);
}

}  // namespace

TEST_CASE("general: two negative handles, one puncture") {
  check_general(general_chi({C(0, 1), C(0, 2)}, {C(1, 0), C(3, 0)}, {C(0, 0)}));
}

TEST_CASE("general: mixed volume classes, one puncture") {
  check_general(general_chi({C(1, 0), C(0, 1), C(2, 0)},
                            {C(0, 1), C(1, 0), C(3, 0)}, {C(0, 0)}));
}

TEST_CASE("general: genus one with two punctures") {
  check_general(general_chi({C(1, 0)}, {C(0, 1)}, {C(2, 1), C(-2, -1)}));
}

TEST_CASE("general: nontrivial ends with zero-volume handle") {
  check_general(general_chi({C(1, 0)}, {C(2, 0)}, {C(0, 1), C(1, 0), C(-1, -1)}));
}

TEST_CASE("general: trivial handles and trivial punctures") {
  check_general(general_chi({C(0, 0), C(0, 0)}, {C(0, 0), C(0, 0)},
                            {C(0, 0), C(0, 0)}));
}

TEST_CASE("general: genus three mixed with four punctures") {
  check_general(general_chi({C(0, 1), root2(), C(0, 0)},
                            {C(1, 0), C(1, 0), C(0, 0)},
                            {C(1, 1), C(0, 0), root2(), -root2() - C(1, 1)}));
}

TEST_CASE("trivial stratum: sphere cases") {
  struct Case {
    std::vector<int> kappa, nu;
  };
  std::vector<Case> cases{
      {{2}, {4}},                       // (C, z^2 dz)
      {{1, 1}, {4}},                    // split on one cone
      {{2, 2}, {3, 3}},                 // two cones joined
      {{4, 3, 3, 1, 1}, {3, 5, 3, 3}},  // the worked example
      {{3, 1}, {2, 2, 2}},
  };
  for (const Case& cs : cases) {
    CAPTURE(cs.kappa.front());
    MarkedSurface ms = realize_trivial_stratum(F(), 0, cs.kappa, cs.nu);
    AuditResult a = audit_surface(ms.complex);
    CHECK(a.genus == 0);
    CHECK(a.zero_orders() == cs.kappa);
    CHECK(a.pole_orders() == cs.nu);
    StratumSpec want{cs.kappa, cs.nu};
    PeriodCharacter chi = trivial_character(F(), 0, static_cast<int>(cs.nu.size()));
    RealizationCheck chk = verify_realization(ms, chi, want);
    for (const std::string& m : chk.failures) MESSAGE(m);
    CHECK(chk.pass);
  }
}

TEST_CASE("trivial stratum rejects non-realizable data") {
  CHECK_THROWS_AS(realize_trivial_stratum(F(), 0, {2}, {2, 2}), RealizeError);
  CHECK_THROWS_AS(realize_trivial_stratum(F(), 0, {1, 1}, {1, 3}), RealizeError);
}

TEST_CASE("trivial stratum: positive genus") {
  struct Case {
    int g;
    std::vector<int> kappa, nu;
  };
  std::vector<Case> cases{
      {1, {2, 1, 1}, {4}},        // drop-one undo
      {1, {2, 2}, {4}},           // both-decrement undo
      {1, {1, 1, 1, 1}, {4}},     // drop-two undo
      {2, {2, 2, 2}, {2, 2}},     // two reductions
      {3, {5, 4, 3, 1}, {4, 5}},  // the worked genus-3 example
  };
  for (const Case& cs : cases) {
    CAPTURE(cs.g);
    CAPTURE(cs.kappa.front());
    MarkedSurface ms = realize_trivial_stratum(F(), cs.g, cs.kappa, cs.nu);
    AuditResult a = audit_surface(ms.complex);
    CHECK(a.genus == cs.g);
    CHECK(a.zero_orders() == cs.kappa);
    CHECK(a.pole_orders() == cs.nu);
    StratumSpec want{cs.kappa, cs.nu};
    PeriodCharacter chi = trivial_character(F(), cs.g, static_cast<int>(cs.nu.size()));
    RealizationCheck chk = verify_realization(ms, chi, want);
    for (const std::string& m : chk.failures) MESSAGE(m);
    CHECK(chk.pass);
  }
}
