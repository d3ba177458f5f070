#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dnsvec/ontology.hpp"
#include "dnsvec/situation.hpp"

namespace dnsvec::test {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(DNSVEC_FIXTURE_DIR) / name;
}

inline const std::vector<std::string>& fixture_ontologies() {
  static const std::vector<std::string> names{
      "fig.sandra",         "fig.sandra.json",   "panel.sandra",  "mini_iraven.sandra",
      "mini_fmnist.sandra", "three_part.sandra", "iraven.sandra", "adversarial/sibling_roles.sandra"};
  return names;
}

inline Declaration role_decl(std::string name, std::vector<std::string> parents = {}) {
  return {ElementKind::Role, std::move(name), std::move(parents), {}, std::nullopt};
}

inline Declaration desc_decl(std::string name, std::vector<std::string> components,
                             std::vector<std::string> parents = {}) {
  return {ElementKind::Description, std::move(name), std::move(parents), std::move(components), std::nullopt};
}

/// Random valid declaration list. Names are shuffled so that declaration
/// order, index order and dependency order all differ.
inline std::vector<Declaration> random_declarations(std::mt19937_64& rng, std::size_t max_roles = 8,
                                                    std::size_t max_descriptions = 6) {
  std::uniform_int_distribution<std::size_t> nr(1, max_roles);
  std::uniform_int_distribution<std::size_t> nd(0, max_descriptions);
  const std::size_t roles = nr(rng);
  const std::size_t descs = nd(rng);

  std::vector<std::string> pool;
  for (std::size_t i = 0; i < roles + descs; ++i) pool.push_back("n" + std::to_string(i) + "_x");
  std::shuffle(pool.begin(), pool.end(), rng);
  const std::vector<std::string> role_names(pool.begin(), pool.begin() + static_cast<long>(roles));
  const std::vector<std::string> desc_names(pool.begin() + static_cast<long>(roles), pool.end());

  std::bernoulli_distribution coin(0.3);
  std::vector<Declaration> out;
  for (std::size_t i = 0; i < roles; ++i) {
    std::vector<std::string> parents;
    for (std::size_t j = 0; j < i; ++j) {
      if (coin(rng)) parents.push_back(role_names[j]);
    }
    out.push_back(role_decl(role_names[i], parents));
  }
  for (std::size_t i = 0; i < descs; ++i) {
    std::vector<std::string> parts;
    std::set<std::string> seen;
    std::uniform_int_distribution<std::size_t> size(1, 4);
    const std::size_t want = size(rng);
    for (std::size_t t = 0; t < 4 * want && parts.size() < want; ++t) {
      std::string pick;
      if (i > 0 && coin(rng)) {
        pick = desc_names[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)];
      } else {
        pick = role_names[std::uniform_int_distribution<std::size_t>(0, roles - 1)(rng)];
      }
      if (seen.insert(pick).second) parts.push_back(pick);
    }
    std::vector<std::string> parents;
    for (std::size_t j = 0; j < i; ++j) {
      if (coin(rng) && coin(rng)) parents.push_back(desc_names[j]);
    }
    out.push_back(desc_decl(desc_names[i], parts, parents));
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

/// Random situation over `roles`, with ids unique across the tree.
inline Situation random_situation(std::mt19937_64& rng, const std::vector<std::string>& roles,
                                  std::size_t depth = 2, std::size_t max_entities = 4) {
  std::size_t next = 0;
  auto build = [&](auto&& self, std::size_t level) -> Situation {
    Situation s;
    s.id = "s" + std::to_string(next++);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, max_entities)(rng);
    for (std::size_t i = 0; i < n; ++i) {
      Entity e;
      e.id = "e" + std::to_string(next++);
      const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
      for (std::size_t j = 0; j < k; ++j) {
        e.roles.push_back(roles[std::uniform_int_distribution<std::size_t>(0, roles.size() - 1)(rng)]);
      }
      s.entities.push_back(std::move(e));
    }
    if (level < depth) {
      const std::size_t children = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
      for (std::size_t c = 0; c < children; ++c) s.situations.push_back(self(self, level + 1));
    }
    return s;
  };
  return build(build, 0);
}

}  // namespace dnsvec::test
