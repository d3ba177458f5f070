#include "dnsvec/encoder.hpp"

#include <algorithm>
#include <string>

namespace dnsvec {

namespace {

void count_roles(const Ontology& o, const Situation& s, std::vector<double>& counts) {
  for (const auto& entity : s.entities) {
    for (const auto& role : entity.roles) {
      auto id = o.find(role);
      if (!id || !o.is_role(*id)) {
        throw Error(ErrorKind::UnknownRole, "entity '" + entity.id + "' in situation '" + s.id +
                                                "' is classified by unknown role '" + role + "'");
      }
      counts[id->index] += 1.0;
    }
  }
  for (const auto& nested : s.situations) count_roles(o, nested, counts);
}

}  // namespace

Encoder::Encoder(const Ontology& ontology) : ontology_(&ontology) {
  const std::size_t n = ontology.dim();
  vectors_.assign(n, Vector());

  for (auto r : ontology.roles()) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t y = 0; y < n; ++y) {
      if (ontology.is_subsumed(r, ElementId{y})) v(static_cast<Eigen::Index>(y)) = 1.0;
    }
    vectors_[r.index] = std::move(v);
  }

  // Descriptions depend on their description components; resolve depth-first.
  std::vector<bool> done(n, false);
  for (auto r : ontology.roles()) done[r.index] = true;
  std::vector<ElementId> stack;
  for (auto root : ontology.descriptions()) {
    if (done[root.index]) continue;
    stack.push_back(root);
    while (!stack.empty()) {
      const ElementId d = stack.back();
      if (done[d.index]) {
        stack.pop_back();
        continue;
      }
      bool ready = true;
      for (auto c : ontology.components(d)) {
        if (!done[c.index]) {
          stack.push_back(c);
          ready = false;
        }
      }
      if (!ready) continue;

      // Sum in index order so the result does not depend on declaration order.
      auto parts = ontology.components(d);
      std::sort(parts.begin(), parts.end());
      Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
      for (auto c : parts) v += vectors_[c.index];
      vectors_[d.index] = std::move(v);
      done[d.index] = true;
      stack.pop_back();
    }
  }
}

const Vector& Encoder::role_vector(ElementId r) const {
  if (!ontology_->is_role(r)) {
    throw Error(ErrorKind::KindMismatch, "'" + ontology_->name(r) + "' is not a role");
  }
  return vectors_[r.index];
}

const Vector& Encoder::describe(ElementId d) const {
  if (!ontology_->is_description(d)) {
    throw Error(ErrorKind::KindMismatch, "'" + ontology_->name(d) + "' is not a description");
  }
  return vectors_[d.index];
}

Basis Encoder::build_basis(ElementId d) const {
  describe(d);  // kind check
  Basis basis;
  basis.description = d;
  basis.components = ontology_->components(d);
  const auto k = static_cast<Eigen::Index>(basis.components.size());
  basis.a.resize(static_cast<Eigen::Index>(dim()), k);
  for (Eigen::Index i = 0; i < k; ++i) basis.a.col(i) = vectors_[basis.components[i].index];

  basis.rank = rank_of(basis.a);
  if (basis.rank != k) {
    throw Error(ErrorKind::RankDeficient, "components of description '" + ontology_->name(d) +
                                              "' are linearly dependent (rank " +
                                              std::to_string(basis.rank) + " < " +
                                              std::to_string(k) + ")");
  }
  basis.a_pinv = pseudo_inverse(basis.a);
  return basis;
}

BasisMap Encoder::build_all_bases() const {
  BasisMap out;
  for (auto d : ontology_->descriptions()) out.emplace(d, build_basis(d));
  return out;
}

Vector Encoder::encode_situation(const Situation& s) const {
  std::vector<double> counts(dim(), 0.0);
  count_roles(*ontology_, s, counts);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim()));
  for (std::size_t r = 0; r < counts.size(); ++r) {
    if (counts[r] != 0.0) v += counts[r] * vectors_[r];
  }
  return v;
}

LeastSquares solve_coefficients(const Basis& basis, const Vector& v) {
  return solve_coefficients(basis.a, basis.a_pinv, v);
}

}  // namespace dnsvec
