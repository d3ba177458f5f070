#pragma once

#include <compare>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dnsvec/error.hpp"

namespace dnsvec {

enum class ElementKind { Role, Description };

std::string_view to_string(ElementKind kind);

/// Position of an element in the ontology index. Indices follow the
/// lexicographic order of element names.
struct ElementId {
  std::size_t index = 0;

  friend auto operator<=>(const ElementId&, const ElementId&) = default;
};

/// One `role` or `description` statement, before validation.
struct Declaration {
  ElementKind kind = ElementKind::Role;
  std::string name;
  std::vector<std::string> parents;
  std::vector<std::string> components;  // descriptions only
  std::optional<SourceSpan> span;       // where the name was declared, if known

  // Spans are provenance, not content.
  friend bool operator==(const Declaration& a, const Declaration& b) {
    return a.kind == b.kind && a.name == b.name && a.parents == b.parents &&
           a.components == b.components;
  }
};

/// Immutable, validated ontology: roles, descriptions, composition (r in d)
/// and a subsumption DAG over roles and descriptions.
///
/// Thread-safe for concurrent readers once built.
class Ontology {
 public:
  /// Validates `decls` and assigns the index. Throws Error with kind
  /// DuplicateName, UnknownReference, KindMismatch (cross-kind subsumption),
  /// EmptyDescription, CompositionCycle or SubsumptionCycle.
  static Ontology build(std::span<const Declaration> decls);

  std::size_t dim() const noexcept { return names_.size(); }
  std::size_t role_count() const noexcept { return roles_.size(); }
  std::size_t description_count() const noexcept { return descriptions_.size(); }

  const std::string& name(ElementId id) const { return names_.at(id.index); }
  ElementKind kind(ElementId id) const { return kinds_.at(id.index); }
  bool is_role(ElementId id) const { return kind(id) == ElementKind::Role; }
  bool is_description(ElementId id) const { return kind(id) == ElementKind::Description; }

  std::optional<ElementId> find(std::string_view name) const;
  /// Like find() but throws UnknownReference.
  ElementId id(std::string_view name) const;

  /// All element ids in index order.
  std::vector<ElementId> elements() const;
  /// Roles / descriptions in index order.
  const std::vector<ElementId>& roles() const noexcept { return roles_; }
  const std::vector<ElementId>& descriptions() const noexcept { return descriptions_; }
  /// Position of a description within descriptions(); throws KindMismatch for roles.
  std::size_t description_slot(ElementId d) const;

  /// Components of a description in declaration order, duplicates removed.
  /// Empty for roles.
  const std::vector<ElementId>& components(ElementId id) const { return components_.at(id.index); }
  /// Direct subsumption parents.
  const std::vector<ElementId>& parents(ElementId id) const { return parents_.at(id.index); }

  /// Reflexive-transitive subsumption: x == y or a path x -> ... -> y exists.
  bool is_subsumed(ElementId x, ElementId y) const;
  bool is_subsumed(std::string_view x, std::string_view y) const {
    return is_subsumed(id(x), id(y));
  }

  /// Children precede their subsumption parents; ties broken by name.
  std::vector<ElementId> topological_order() const;

  /// Non-fatal findings from build(), e.g. descriptions with identical
  /// component sets.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// Declarations that rebuild this ontology, in index order.
  std::vector<Declaration> declarations() const;

 private:
  Ontology() = default;

  std::vector<std::string> names_;
  std::vector<ElementKind> kinds_;
  std::unordered_map<std::string, std::size_t> lookup_;
  std::vector<ElementId> roles_;
  std::vector<ElementId> descriptions_;
  std::vector<std::size_t> description_slot_;
  std::vector<std::vector<ElementId>> components_;
  std::vector<std::vector<ElementId>> parents_;
  // ancestors_[x] is a bitset over all elements: bit y set iff x is subsumed by y.
  std::vector<std::vector<std::uint64_t>> ancestors_;
  std::vector<std::string> warnings_;
};

}  // namespace dnsvec
