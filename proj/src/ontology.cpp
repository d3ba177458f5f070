#include "dnsvec/ontology.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace dnsvec {

std::string_view to_string(ElementKind kind) {
  return kind == ElementKind::Role ? "role" : "description";
}

namespace {

using Adjacency = std::vector<std::vector<std::size_t>>;

// Returns one cycle (as a closed walk of node indices) if the graph has any.
// Nodes are visited in index order so the reported cycle is deterministic.
std::optional<std::vector<std::size_t>> find_cycle(const Adjacency& adj) {
  enum class Mark { White, Grey, Black };
  std::vector<Mark> mark(adj.size(), Mark::White);
  std::vector<std::size_t> stack;

  for (std::size_t root = 0; root < adj.size(); ++root) {
    if (mark[root] != Mark::White) continue;
    // Iterative DFS: (node, next edge to explore).
    std::vector<std::pair<std::size_t, std::size_t>> frames{{root, 0}};
    mark[root] = Mark::Grey;
    stack.assign(1, root);
    while (!frames.empty()) {
      auto& [node, edge] = frames.back();
      if (edge == adj[node].size()) {
        mark[node] = Mark::Black;
        frames.pop_back();
        stack.pop_back();
        continue;
      }
      const std::size_t next = adj[node][edge++];
      if (mark[next] == Mark::Grey) {
        auto from = std::find(stack.begin(), stack.end(), next);
        std::vector<std::size_t> cycle(from, stack.end());
        cycle.push_back(next);
        return cycle;
      }
      if (mark[next] == Mark::White) {
        mark[next] = Mark::Grey;
        stack.push_back(next);
        frames.emplace_back(next, 0);
      }
    }
  }
  return std::nullopt;
}

std::string describe_cycle(const std::vector<std::size_t>& cycle,
                           const std::vector<std::string>& names, std::string_view arrow) {
  std::string out;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    if (i) out += arrow;
    out += names[cycle[i]];
  }
  return out;
}

}  // namespace

Ontology Ontology::build(std::span<const Declaration> decls) {
  Ontology o;

  // Duplicate names are reported at their second declaration.
  std::map<std::string, const Declaration*> by_name;
  for (const auto& d : decls) {
    auto [it, inserted] = by_name.emplace(d.name, &d);
    if (!inserted) {
      throw Error(ErrorKind::DuplicateName, "duplicate name '" + d.name + "'", d.span);
    }
  }

  // std::map iteration is the lexicographic (byte-wise) order of names.
  for (const auto& [name, decl] : by_name) {
    o.lookup_.emplace(name, o.names_.size());
    o.names_.push_back(name);
    o.kinds_.push_back(decl->kind);
  }
  const std::size_t n = o.names_.size();
  o.components_.resize(n);
  o.parents_.resize(n);
  o.description_slot_.assign(n, SIZE_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    if (o.kinds_[i] == ElementKind::Role) {
      o.roles_.push_back(ElementId{i});
    } else {
      o.description_slot_[i] = o.descriptions_.size();
      o.descriptions_.push_back(ElementId{i});
    }
  }

  for (const auto& [name, decl] : by_name) {
    const std::size_t self = o.lookup_.at(name);
    auto resolve = [&](const std::string& ref, std::string_view what) {
      auto it = o.lookup_.find(ref);
      if (it == o.lookup_.end()) {
        throw Error(ErrorKind::UnknownReference,
                    "unknown " + std::string(what) + " '" + ref + "' referenced by '" + name + "'",
                    decl->span);
      }
      return it->second;
    };

    for (const auto& p : decl->parents) {
      const std::size_t parent = resolve(p, "parent");
      if (o.kinds_[parent] != o.kinds_[self]) {
        throw Error(ErrorKind::KindMismatch,
                    std::string(to_string(o.kinds_[self])) + " '" + name + "' cannot be subsumed by " +
                        std::string(to_string(o.kinds_[parent])) + " '" + p + "'",
                    decl->span);
      }
      if (std::find(o.parents_[self].begin(), o.parents_[self].end(), ElementId{parent}) ==
          o.parents_[self].end()) {
        o.parents_[self].push_back(ElementId{parent});
      }
    }

    if (decl->kind == ElementKind::Role) {
      if (!decl->components.empty()) {
        throw Error(ErrorKind::KindMismatch, "role '" + name + "' cannot have components", decl->span);
      }
      continue;
    }
    if (decl->components.empty()) {
      throw Error(ErrorKind::EmptyDescription, "description '" + name + "' has no components",
                  decl->span);
    }
    for (const auto& c : decl->components) {
      const ElementId component{resolve(c, "component")};
      auto& list = o.components_[self];
      if (std::find(list.begin(), list.end(), component) != list.end()) {
        o.warnings_.push_back("description '" + name + "' lists component '" + c +
                              "' more than once; duplicates ignored");
        continue;
      }
      list.push_back(component);
    }
  }

  Adjacency composition(n), subsumption(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto c : o.components_[i]) {
      if (o.kinds_[c.index] == ElementKind::Description) composition[i].push_back(c.index);
    }
    for (auto p : o.parents_[i]) subsumption[i].push_back(p.index);
  }
  if (auto cycle = find_cycle(composition)) {
    throw Error(ErrorKind::CompositionCycle,
                "composition cycle: " + describe_cycle(*cycle, o.names_, " contains "),
                by_name.at(o.names_[cycle->front()])->span);
  }
  if (auto cycle = find_cycle(subsumption)) {
    throw Error(ErrorKind::SubsumptionCycle,
                "subsumption cycle: " + describe_cycle(*cycle, o.names_, " < "),
                by_name.at(o.names_[cycle->front()])->span);
  }

  // Ancestor bitsets, parents before children.
  const std::size_t words = (n + 63) / 64;
  o.ancestors_.assign(n, std::vector<std::uint64_t>(words, 0));
  auto order = o.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto& bits = o.ancestors_[it->index];
    bits[it->index / 64] |= std::uint64_t{1} << (it->index % 64);
    for (auto p : o.parents_[it->index]) {
      const auto& pb = o.ancestors_[p.index];
      for (std::size_t w = 0; w < words; ++w) bits[w] |= pb[w];
    }
  }

  // Identical component sets make two descriptions indistinguishable.
  std::map<std::vector<ElementId>, ElementId> seen;
  for (auto d : o.descriptions_) {
    auto key = o.components_[d.index];
    std::sort(key.begin(), key.end());
    auto [it, inserted] = seen.emplace(std::move(key), d);
    if (!inserted) {
      o.warnings_.push_back("descriptions '" + o.names_[it->second.index] + "' and '" +
                            o.names_[d.index] + "' have identical component sets");
    }
  }
  return o;
}

std::optional<ElementId> Ontology::find(std::string_view name) const {
  auto it = lookup_.find(std::string(name));
  if (it == lookup_.end()) return std::nullopt;
  return ElementId{it->second};
}

ElementId Ontology::id(std::string_view name) const {
  if (auto found = find(name)) return *found;
  throw Error(ErrorKind::UnknownReference, "unknown element '" + std::string(name) + "'");
}

std::vector<ElementId> Ontology::elements() const {
  std::vector<ElementId> out(dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ElementId{i};
  return out;
}

std::size_t Ontology::description_slot(ElementId d) const {
  if (!is_description(d)) {
    throw Error(ErrorKind::KindMismatch, "'" + name(d) + "' is not a description");
  }
  return description_slot_[d.index];
}

bool Ontology::is_subsumed(ElementId x, ElementId y) const {
  if (x.index >= dim() || y.index >= dim()) {
    throw Error(ErrorKind::UnknownReference, "element index out of range");
  }
  return (ancestors_[x.index][y.index / 64] >> (y.index % 64)) & 1U;
}

std::vector<ElementId> Ontology::topological_order() const {
  const std::size_t n = dim();
  std::vector<std::size_t> pending_children(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto p : parents_[i]) ++pending_children[p.index];
  }
  // Min-heap on index == lexicographic tie-break.
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (pending_children[i] == 0) ready.push(i);
  }
  std::vector<ElementId> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t next = ready.top();
    ready.pop();
    order.push_back(ElementId{next});
    for (auto p : parents_[next]) {
      if (--pending_children[p.index] == 0) ready.push(p.index);
    }
  }
  return order;
}

std::vector<Declaration> Ontology::declarations() const {
  std::vector<Declaration> out;
  out.reserve(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    Declaration d;
    d.kind = kinds_[i];
    d.name = names_[i];
    for (auto p : parents_[i]) d.parents.push_back(names_[p.index]);
    for (auto c : components_[i]) d.components.push_back(names_[c.index]);
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace dnsvec
