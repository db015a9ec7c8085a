#pragma once

#include <optional>
#include <vector>

#include "holonomy/complex.hpp"

namespace holonomy {

// Abstract branch datum over the sphere: partitions record the local degrees
// over each branch value.
struct BranchDatum {
  int source_genus = 0;
  int degree = 1;
  std::vector<std::vector<int>> partitions;  // each sorted descending

  void normalize();
  friend bool operator==(const BranchDatum&, const BranchDatum&) = default;
};

struct DatumCheck {
  bool ok = true;
  std::string detail;
  int total_preimages = 0;  // n-tilde
};

// Riemann-Hurwitz validation: partitions partition the degree, each carries
// an entry > 1, and chi(S_g) - ntilde = degree * (2 - n).
DatumCheck validate_datum(const BranchDatum& d);

// permutations as image vectors on {0..degree-1}
using Perm = std::vector<int>;

struct MonodromyTuple {
  std::vector<Perm> permutations;
};

std::vector<int> cycle_type(const Perm& p);              // sorted descending
Perm compose(const Perm& a, const Perm& b);              // (a o b)(x) = a(b(x))
Perm inverse(const Perm& p);
bool is_transitive(const std::vector<Perm>& gens, int degree);
// lexicographically least permutation with the given cycle type
Perm minimal_representative(std::vector<int> type, int degree);

struct DegreeTooLarge : std::runtime_error {
  DegreeTooLarge() : std::runtime_error("DegreeTooLarge: raise the search bound") {}
};

// Exhaustive monodromy search: the lexicographically least witness tuple with
// the datum's cycle types, identity product and transitive action, or
// nullopt.  The first permutation is pinned to the minimal representative of
// its class (conjugation-complete).
std::optional<MonodromyTuple> brute_force_realize(const BranchDatum& d, int degree_bound = 7);

struct NotIntegral : std::runtime_error {
  NotIntegral() : std::runtime_error("NotIntegral: holonomy is not integral") {}
};
struct NotAllSimple : std::runtime_error {
  NotAllSimple() : std::runtime_error("NotAllSimple: every end must be a simple pole") {}
};

struct SurfaceDatum {
  BranchDatum datum;
  std::vector<int> lambda, mu;  // positive / negative residues, descending
};

// The branched-cover datum of an integral-holonomy surface with simple poles:
// degree = sum(lambda); partitions are lambda, mu (each unless all ones) and
// one partition per developed zero position.
SurfaceDatum datum_from_surface(const MarkedSurface& ms);

struct InvalidTuple : std::runtime_error {
  explicit InvalidTuple(const std::string& m) : std::runtime_error("InvalidTuple: " + m) {}
};

// Pulls the unit cylinder back through the monodromy: plus_index/minus_index
// designate the partitions over the two cylinder ends (-1 when that fiber is
// unbranched, i.e. the all-ones partition is omitted from the datum).
MarkedSurface surface_from_monodromy(const MonodromyTuple& t, int degree, int plus_index,
                                     int minus_index, const FieldPtr& field);

enum class SufficiencyMode { CorollaryD, CorollaryF };

struct SufficiencyCertificate {
  bool applicable = false;
  std::string detail;
  MarkedSurface witness;
  BranchDatum datum;
};

struct CorollaryFData {
  std::vector<int> lambda, mu, zero_orders;
  int genus = 0;
};

SufficiencyCertificate sufficiency_check_corollary_d(const BranchDatum& d);
SufficiencyCertificate sufficiency_check_corollary_f(const CorollaryFData& data);

}  // namespace holonomy
