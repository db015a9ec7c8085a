#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "holonomy/field.hpp"

namespace holonomy {

// chi on the marked basis a1..ag, b1..bg, g1..gn with sum(gamma) = 0.
struct PeriodCharacter {
  int genus = 0;
  int punctures = 0;
  FieldPtr field;
  std::vector<ExactComplex> alpha, beta, gamma;

  void validate() const;
  ExactComplex handle_value(int k) const;  // k in [0, 2g): a1, b1, a2, b2, ...
  std::vector<ExactComplex> all_values() const;
  PeriodCharacter scaled(const ExactComplex& s) const;
};

PeriodCharacter trivial_character(FieldPtr f, int genus, int punctures);

// vol(chi) = sum Im(conj(alpha_i) beta_i)
Scalar volume(const PeriodCharacter& chi);

// (chi_g, chi_n): handle part (n = 0) and puncture part (g = 0)
std::pair<PeriodCharacter, PeriodCharacter> split_character(const PeriodCharacter& chi);

struct CharacterClass {
  enum class Kind { Trivial, Rational, RSpanOnly, Generic };
  Kind kind;
  ExactComplex span;  // c: Rational: values in Z*c with content 1; RSpanOnly:
                      // first nonzero value
};

struct HandleProfile {
  std::vector<int> volume_signs;  // per handle
  int negative = 0, zero = 0, positive = 0;
};

std::pair<CharacterClass, HandleProfile> classify_character(const PeriodCharacter& chi);
CharacterClass classify_values(const std::vector<ExactComplex>& values);

struct HauptVerdict {
  bool realizable = false;
  std::string reason;  // NonPositiveVolume | LatticeDeficient | NotALattice
};

// Haupt's decision for the closed-surface (handle-only) character.
HauptVerdict haupt_decide(const PeriodCharacter& chi_g, int genus);

struct NotRational : std::runtime_error {
  NotRational() : std::runtime_error("NotRational: character is not rational") {}
};

// Rescales a rational character to a surjective integral one; returns the
// scale with chi = scale * chi_hat.
std::pair<PeriodCharacter, ExactComplex> normalize_integral(const PeriodCharacter& chi);

// Integer matrix acting on the handle generators (interleaved a1, b1, a2,
// b2, ...) plus integer additions of puncture loops to handle generators.
struct BasisChange {
  int genus = 0;
  std::vector<std::vector<Integer>> matrix;  // 2g x 2g, symplectic
  // additions[k][j]: generator k gains additions[k][j] copies of gamma_j
  std::map<int, std::vector<Integer>> puncture_additions;

  static BasisChange identity(int genus);
  bool is_identity() const;
  BasisChange compose_after(const BasisChange& first) const;  // this o first
  void check_symplectic() const;
};

struct NotSymplectic : std::runtime_error {
  NotSymplectic() : std::runtime_error("NotSymplectic: matrix breaks the symplectic form") {}
};

PeriodCharacter apply_basis_change(const PeriodCharacter& chi, const BasisChange& bc);

enum class McgMode {
  NonzeroHandles,
  NontrivialGenusPart,
  ShrinkIrrational,
  IrrationalRatios,
  HandlesToOne,
};

struct HypothesisNotMet : std::runtime_error {
  explicit HypothesisNotMet(const std::string& m)
      : std::runtime_error("HypothesisNotMet: " + m) {}
};

// Normalizes the character by a mapping-class action; the returned change
// reproduces the result via apply_basis_change.
std::pair<PeriodCharacter, BasisChange> mcg_normalize(
    const PeriodCharacter& chi, McgMode mode,
    const std::optional<Scalar>& epsilon = std::nullopt);

struct StratumDecision {
  bool realizable = false;
  std::string rule;  // ThmB | ThmE | ThmC_i..ThmC_iv | OrderCondition | ...
};

struct BadStratum : std::runtime_error {
  explicit BadStratum(const std::string& m) : std::runtime_error("BadStratum: " + m) {}
};

// The master decision: which rule fires first for chi against H(kappa; nu).
StratumDecision decide_stratum(const PeriodCharacter& chi, const std::vector<int>& kappa,
                               const std::vector<int>& nu);

// floor of the exact ratio a/b for b > 0 (helper for the Euclidean modes).
Integer scalar_floor_div(const Scalar& a, const Scalar& b);

}  // namespace holonomy
