#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dnsvec/encoder.hpp"

namespace dnsvec {

/// Heaviside counts strictly positive coefficients; ReLU sums their positive
/// parts. Both divide by |d|.
enum class Activation { Heaviside, Relu };

std::string_view to_string(Activation a);

/// Coefficients at or below this value are inactive under Heaviside.
inline constexpr double kPositiveThreshold = 1e-9;
/// Coefficients within this distance of 0 sit on the ReLU kink; the Jacobian
/// uses the zero subgradient there.
inline constexpr double kKinkTolerance = 1e-6;

struct SatisfactionReport {
  ElementId description;
  Vector coefficients;
  std::vector<bool> active_mask;  // coefficient > kPositiveThreshold
  double probability = 0.0;       // ReLU values are not clamped and may exceed 1
  double residual_norm = 0.0;

  std::size_t active_count() const;
};

/// Probability that the situation encoded by `v` satisfies the basis'
/// description. Throws DimensionMismatch.
SatisfactionReport satisfaction(const Basis& basis, const Vector& v, Activation mode);

/// One probability per description, in Ontology::descriptions() order.
struct DeductionVector {
  std::vector<ElementId> descriptions;
  std::vector<double> values;
};

/// Throws MissingBasis if `bases` does not cover every description.
std::vector<SatisfactionReport> satisfy_all(const Ontology& o, const BasisMap& bases,
                                            const Vector& v, Activation mode);
DeductionVector deduce(const Ontology& o, const BasisMap& bases, const Vector& v, Activation mode);

struct KinkWarning {
  ElementId description;
  std::size_t component = 0;  // column of the basis
  double coefficient = 0.0;
};

struct JacobianResult {
  Matrix jacobian;  // |D| x dim, rows in Ontology::descriptions() order
  std::vector<KinkWarning> kinks;
};

/// Derivative of the ReLU deduction vector with respect to v. Row d is
/// (1/|d|) times the sum of the pseudo-inverse rows whose coefficient is
/// positive.
JacobianResult jacobian(const Ontology& o, const BasisMap& bases, const Vector& v);

// ---------------------------------------------------------------------------
// Symbolic satisfaction

/// How nested situations are read by the symbolic checker.
///
/// Flattened: entities of nested situations belong to the enclosing
/// situation, and a description component matches when it is nearly
/// satisfied. This is the reading under which the vector encoding (which sums
/// nested situations into their parent) is complete.
///
/// Strict: a role component needs an entity directly in the situation; a
/// description component needs a directly nested situation satisfying it.
enum class OracleSemantics { Flattened, Strict };

std::string_view to_string(OracleSemantics s);

struct ComponentMatch {
  ElementId component;
  bool matched = false;
  std::vector<std::string> entities;  // entity ids supporting the match
};

struct OracleVerdict {
  bool satisfied = false;
  bool nearly_satisfied = false;
  std::set<ElementId> matched_components;
  std::vector<ComponentMatch> trace;  // one per component, declaration order
};

/// Purely symbolic check of `d` against `s` (no vectors). Throws
/// UnknownReference for classifications that are not roles of `o`.
OracleVerdict symbolic_satisfies(const Ontology& o, const Situation& s, ElementId d,
                                 OracleSemantics semantics = OracleSemantics::Flattened);

struct Counterexample {
  Situation situation;
  SatisfactionReport report;
  OracleVerdict verdict;
  std::string violated;  // which equivalence failed
};

struct TheoremReport {
  std::size_t situations = 0;
  std::size_t checks = 0;
  std::vector<Counterexample> counterexamples;

  bool ok() const { return counterexamples.empty(); }
};

/// For every (situation, description) pair, compares the Heaviside
/// probability with the symbolic verdict:
///   p = 1 <=> satisfied,  p > 0 <=> nearly satisfied,  p = 0 <=> not nearly satisfied.
/// Counterexamples are collected, never thrown.
TheoremReport verify_theorems(const Encoder& encoder, const BasisMap& bases,
                              std::span<const Situation> situations,
                              OracleSemantics semantics = OracleSemantics::Flattened);

/// Every situation (up to reordering) whose entities carry one role each from
/// `roles`, with at most `max_entities` entities in the whole tree and nested
/// situations at most `max_depth` levels deep. Nested situations are
/// non-empty. The empty situation is included.
std::vector<Situation> enumerate_situations(std::span<const std::string> roles,
                                            std::size_t max_entities, std::size_t max_depth);

// ---------------------------------------------------------------------------
// Gradient check

struct GradcheckResult {
  std::size_t trials = 0;
  std::size_t rejected = 0;  // samples discarded for sitting too close to a kink
  double max_relative_error = 0.0;
};

/// Compares jacobian() with central finite differences of the ReLU deduction
/// vector at `trials` random points whose coefficients all satisfy
/// |x_i| > min_coefficient.
GradcheckResult gradcheck(const Encoder& encoder, const BasisMap& bases, std::size_t trials,
                          std::uint64_t seed, double step = 1e-5, double min_coefficient = 1e-4);

}  // namespace dnsvec
