#pragma once

#include <map>
#include <vector>

#include "dnsvec/numerics.hpp"
#include "dnsvec/ontology.hpp"
#include "dnsvec/situation.hpp"

namespace dnsvec {

/// Column basis of the subspace spanned by a description's components.
struct Basis {
  ElementId description;
  std::vector<ElementId> components;  // column order == declaration order
  Matrix a;                           // dim x |d|, column i is the vector of components[i]
  Matrix a_pinv;                      // |d| x dim
  int rank = 0;
};

using BasisMap = std::map<ElementId, Basis>;

/// Maps ontology elements and situations into R^{|R u D|}.
///
/// A role's vector is the indicator of its subsumers (itself included); a
/// description's vector is the sum of its components' vectors. All element
/// vectors are computed once at construction, so a constructed Encoder is
/// read-only and safe to share between threads. The ontology must outlive it.
class Encoder {
 public:
  explicit Encoder(const Ontology& ontology);

  const Ontology& ontology() const noexcept { return *ontology_; }
  std::size_t dim() const noexcept { return ontology_->dim(); }

  /// Throws KindMismatch if `r` is a description.
  const Vector& role_vector(ElementId r) const;
  /// Throws KindMismatch if `d` is a role.
  const Vector& describe(ElementId d) const;
  /// role_vector or describe, by kind.
  const Vector& vector_of(ElementId x) const { return vectors_.at(x.index); }

  /// Throws KindMismatch for roles and RankDeficient when the component
  /// vectors are linearly dependent.
  Basis build_basis(ElementId d) const;
  BasisMap build_all_bases() const;

  /// Sum of the role vectors of every classification of every entity,
  /// nested situations included. Throws UnknownRole.
  Vector encode_situation(const Situation& s) const;

 private:
  const Ontology* ontology_;
  std::vector<Vector> vectors_;
};

/// Coefficients of `v` over the basis columns, with the fit residual.
LeastSquares solve_coefficients(const Basis& basis, const Vector& v);

}  // namespace dnsvec
