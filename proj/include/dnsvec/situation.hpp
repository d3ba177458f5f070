#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dnsvec {

/// An entity and the role names that classify it. Names are resolved
/// against an ontology only when the situation is encoded or checked.
struct Entity {
  std::string id;
  std::vector<std::string> roles;

  friend bool operator==(const Entity&, const Entity&) = default;
};

/// A set of classified entities plus nested situations.
struct Situation {
  std::string id;
  std::vector<Entity> entities;
  std::vector<Situation> situations;

  friend bool operator==(const Situation&, const Situation&) = default;
};

/// Number of entities in the whole tree.
std::size_t total_entities(const Situation& s);
/// 0 for a situation without nested situations.
std::size_t nesting_depth(const Situation& s);

}  // namespace dnsvec
