#pragma once

#include "holonomy/characters.hpp"
#include "holonomy/hurwitz.hpp"
#include "holonomy/surgery.hpp"

namespace holonomy {

struct RealizeError : std::runtime_error {
  explicit RealizeError(const std::string& m) : std::runtime_error(m) {}
};

// Exact audit of a marked surface against its target character: every
// generator holonomy must match, puncture loops must sum to zero, and the
// audited stratum must equal the declared one when given.
RealizationCheck verify_realization(const MarkedSurface& ms, const PeriodCharacter& chi,
                                    const std::optional<StratumSpec>& stratum = std::nullopt);

// A translation structure on S_{0,n} with holonomy chi_n (always exists);
// output is metrically complete.
MarkedSurface realize_sphere(const PeriodCharacter& chi_n);

// A complete translation structure on S_{1,1} with the given handle values.
MarkedSurface realize_torus(const PeriodCharacter& chi);

// Theorem A': a complete translation structure on S_{g,n} (n >= 1) with
// holonomy chi; no stratum is promised.
MarkedSurface realize_general(const PeriodCharacter& chi);

// A trivial-holonomy surface in H(kappa; nu) (requires the Thm B decision).
MarkedSurface realize_trivial_stratum(const FieldPtr& field, int genus,
                                      const std::vector<int>& kappa,
                                      const std::vector<int>& nu);

struct RealizeResult {
  MarkedSurface surface;
  BasisChange change;  // the surface realizes chi o change
};

struct CaseNotCovered : std::runtime_error {
  CaseNotCovered() : std::runtime_error("CaseNotCovered: route to realize_integral_stratum") {}
};

// A surface in H(kappa; nu) with holonomy chi composed with the returned
// basis change; requires a Thm C rule.
RealizeResult realize_nontrivial_stratum(const PeriodCharacter& chi,
                                         const std::vector<int>& kappa,
                                         const std::vector<int>& nu);

struct Gcomb0Violated : std::runtime_error {
  Gcomb0Violated() : std::runtime_error("Gcomb0Violated: residues do not dominate the orders") {}
};

// Integral case: all poles simple, chi surjective integral.
RealizeResult realize_integral_stratum(const PeriodCharacter& chi_hat,
                                       const std::vector<int>& kappa,
                                       const std::vector<int>& nu_all_ones);

// Orders two positive tuples so that no proper prefix sums agree.
std::pair<std::vector<int>, std::vector<int>> irrmult_order(const std::vector<Scalar>& s,
                                                            const std::vector<Scalar>& t);

}  // namespace holonomy
