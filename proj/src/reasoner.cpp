#include "dnsvec/reasoner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>

namespace dnsvec {

std::string_view to_string(Activation a) { return a == Activation::Heaviside ? "heaviside" : "relu"; }

std::string_view to_string(OracleSemantics s) {
  return s == OracleSemantics::Flattened ? "flattened" : "strict";
}

std::size_t SatisfactionReport::active_count() const {
  return static_cast<std::size_t>(std::count(active_mask.begin(), active_mask.end(), true));
}

SatisfactionReport satisfaction(const Basis& basis, const Vector& v, Activation mode) {
  auto fit = solve_coefficients(basis, v);
  SatisfactionReport report;
  report.description = basis.description;
  report.residual_norm = fit.residual_norm;
  const auto k = fit.coefficients.size();
  report.active_mask.resize(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double x = fit.coefficients(i);
    const bool active = x > kPositiveThreshold;
    report.active_mask[static_cast<std::size_t>(i)] = active;
    if (mode == Activation::Heaviside) {
      sum += active ? 1.0 : 0.0;
    } else {
      sum += std::max(x, 0.0);
    }
  }
  report.probability = k > 0 ? sum / static_cast<double>(k) : 0.0;
  report.coefficients = std::move(fit.coefficients);
  return report;
}

namespace {

const Basis& basis_for(const Ontology& o, const BasisMap& bases, ElementId d) {
  auto it = bases.find(d);
  if (it == bases.end()) {
    throw Error(ErrorKind::MissingBasis, "no basis for description '" + o.name(d) + "'");
  }
  return it->second;
}

}  // namespace

std::vector<SatisfactionReport> satisfy_all(const Ontology& o, const BasisMap& bases,
                                            const Vector& v, Activation mode) {
  if (static_cast<std::size_t>(v.size()) != o.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "vector of dimension " + std::to_string(v.size()) +
                                                  " does not match ontology dimension " +
                                                  std::to_string(o.dim()));
  }
  std::vector<SatisfactionReport> out;
  out.reserve(o.description_count());
  for (auto d : o.descriptions()) out.push_back(satisfaction(basis_for(o, bases, d), v, mode));
  return out;
}

DeductionVector deduce(const Ontology& o, const BasisMap& bases, const Vector& v, Activation mode) {
  DeductionVector out;
  for (auto& report : satisfy_all(o, bases, v, mode)) {
    out.descriptions.push_back(report.description);
    out.values.push_back(report.probability);
  }
  return out;
}

JacobianResult jacobian(const Ontology& o, const BasisMap& bases, const Vector& v) {
  const auto reports = satisfy_all(o, bases, v, Activation::Relu);
  JacobianResult out;
  out.jacobian = Matrix::Zero(static_cast<Eigen::Index>(o.description_count()),
                              static_cast<Eigen::Index>(o.dim()));
  for (std::size_t row = 0; row < reports.size(); ++row) {
    const auto& report = reports[row];
    const Basis& basis = basis_for(o, bases, report.description);
    const double scale = 1.0 / static_cast<double>(basis.components.size());
    for (Eigen::Index i = 0; i < report.coefficients.size(); ++i) {
      const double x = report.coefficients(i);
      if (std::abs(x) <= kKinkTolerance) {
        out.kinks.push_back({report.description, static_cast<std::size_t>(i), x});
        continue;
      }
      if (x > 0.0) out.jacobian.row(static_cast<Eigen::Index>(row)) += scale * basis.a_pinv.row(i);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Symbolic satisfaction

namespace {

struct ResolvedEntity {
  const Entity* entity;
  std::vector<ElementId> roles;
};

struct ResolvedSituation {
  std::vector<ResolvedEntity> entities;
  std::vector<ResolvedSituation> nested;
};

ResolvedSituation resolve(const Ontology& o, const Situation& s) {
  ResolvedSituation out;
  for (const auto& e : s.entities) {
    ResolvedEntity re{&e, {}};
    for (const auto& name : e.roles) {
      auto id = o.find(name);
      if (!id || !o.is_role(*id)) {
        throw Error(ErrorKind::UnknownReference,
                    "entity '" + e.id + "' is classified by unknown role '" + name + "'");
      }
      re.roles.push_back(*id);
    }
    out.entities.push_back(std::move(re));
  }
  for (const auto& nested : s.situations) out.nested.push_back(resolve(o, nested));
  return out;
}

void flatten(const ResolvedSituation& s, std::vector<const ResolvedEntity*>& out) {
  for (const auto& e : s.entities) out.push_back(&e);
  for (const auto& nested : s.nested) flatten(nested, out);
}

std::vector<std::string> entities_classified_by(const Ontology& o,
                                                std::span<const ResolvedEntity* const> entities,
                                                ElementId role) {
  std::vector<std::string> ids;
  for (const auto* e : entities) {
    for (auto c : e->roles) {
      if (o.is_subsumed(c, role)) {
        ids.push_back(e->entity->id);
        break;
      }
    }
  }
  return ids;
}

void append_unique(std::vector<std::string>& into, const std::vector<std::string>& from) {
  for (const auto& id : from) {
    if (std::find(into.begin(), into.end(), id) == into.end()) into.push_back(id);
  }
}

OracleVerdict finish(std::vector<ComponentMatch> trace) {
  OracleVerdict verdict;
  std::size_t matched = 0;
  for (const auto& m : trace) {
    if (m.matched) {
      ++matched;
      verdict.matched_components.insert(m.component);
    }
  }
  verdict.nearly_satisfied = matched > 0;
  verdict.satisfied = !trace.empty() && matched == trace.size();
  verdict.trace = std::move(trace);
  return verdict;
}

class FlattenedOracle {
 public:
  FlattenedOracle(const Ontology& o, const ResolvedSituation& s) : o_(o) { flatten(s, entities_); }

  const OracleVerdict& verdict(ElementId d) {
    if (auto it = memo_.find(d); it != memo_.end()) return it->second;
    std::vector<ComponentMatch> trace;
    for (auto c : o_.components(d)) {
      ComponentMatch m{c, false, {}};
      if (o_.is_role(c)) {
        m.entities = entities_classified_by(o_, entities_, c);
        m.matched = !m.entities.empty();
      } else {
        const OracleVerdict& sub = verdict(c);
        m.matched = sub.nearly_satisfied;
        for (const auto& sm : sub.trace) append_unique(m.entities, sm.entities);
      }
      trace.push_back(std::move(m));
    }
    return memo_.emplace(d, finish(std::move(trace))).first->second;
  }

 private:
  const Ontology& o_;
  std::vector<const ResolvedEntity*> entities_;
  std::map<ElementId, OracleVerdict> memo_;
};

OracleVerdict strict_verdict(const Ontology& o, const ResolvedSituation& s, ElementId d) {
  std::vector<const ResolvedEntity*> direct;
  for (const auto& e : s.entities) direct.push_back(&e);

  std::vector<ComponentMatch> trace;
  for (auto c : o.components(d)) {
    ComponentMatch m{c, false, {}};
    if (o.is_role(c)) {
      m.entities = entities_classified_by(o, direct, c);
      m.matched = !m.entities.empty();
    } else {
      for (const auto& nested : s.nested) {
        OracleVerdict sub = strict_verdict(o, nested, c);
        if (!sub.satisfied) continue;
        m.matched = true;
        for (const auto& sm : sub.trace) append_unique(m.entities, sm.entities);
      }
    }
    trace.push_back(std::move(m));
  }
  return finish(std::move(trace));
}

}  // namespace

OracleVerdict symbolic_satisfies(const Ontology& o, const Situation& s, ElementId d,
                                 OracleSemantics semantics) {
  if (!o.is_description(d)) {
    throw Error(ErrorKind::KindMismatch, "'" + o.name(d) + "' is not a description");
  }
  const ResolvedSituation resolved = resolve(o, s);
  if (semantics == OracleSemantics::Strict) return strict_verdict(o, resolved, d);
  FlattenedOracle oracle(o, resolved);
  return oracle.verdict(d);
}

TheoremReport verify_theorems(const Encoder& encoder, const BasisMap& bases,
                              std::span<const Situation> situations, OracleSemantics semantics) {
  const Ontology& o = encoder.ontology();
  TheoremReport report;
  report.situations = situations.size();
  for (const auto& s : situations) {
    const Vector v = encoder.encode_situation(s);
    for (auto d : o.descriptions()) {
      SatisfactionReport sat = satisfaction(basis_for(o, bases, d), v, Activation::Heaviside);
      OracleVerdict verdict = symbolic_satisfies(o, s, d, semantics);
      ++report.checks;

      const std::size_t active = sat.active_count();
      const bool full = active == sat.active_mask.size();
      std::string violated;
      if (full != verdict.satisfied) {
        violated = full ? "p = 1 but not satisfied" : "satisfied but p < 1";
      } else if ((active > 0) != verdict.nearly_satisfied) {
        violated = active > 0 ? "p > 0 but not nearly satisfied" : "nearly satisfied but p = 0";
      }
      if (!violated.empty()) {
        report.counterexamples.push_back({s, std::move(sat), std::move(verdict), std::move(violated)});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

struct Shape {
  std::vector<std::size_t> labels;  // nondecreasing
  std::vector<std::size_t> children;  // indices into the shape table one level down, nondecreasing
  std::size_t size = 0;  // entities in the whole subtree
};

class ShapeTable {
 public:
  ShapeTable(std::size_t labels, std::size_t max_entities, std::size_t max_depth)
      : labels_(labels), levels_(max_depth + 1) {
    // levels_[k] holds shapes whose nesting depth is at most k.
    for (std::size_t depth = 0; depth <= max_depth; ++depth) build(depth, max_entities);
  }

  const std::vector<Shape>& level(std::size_t depth) const { return levels_[depth]; }

 private:
  void build(std::size_t depth, std::size_t budget) {
    std::vector<std::size_t> multiset;
    for_each_multiset(budget, multiset, [&](const std::vector<std::size_t>& labels) {
      Shape base{labels, {}, labels.size()};
      if (depth == 0) {
        levels_[depth].push_back(std::move(base));
        return;
      }
      add_children(depth, base, 0, budget - labels.size());
    });
  }

  // Appends every multiset of nonempty child shapes fitting in `remaining`.
  void add_children(std::size_t depth, Shape& shape, std::size_t first, std::size_t remaining) {
    levels_[depth].push_back(shape);
    const auto& children = levels_[depth - 1];
    for (std::size_t c = first; c < children.size(); ++c) {
      const std::size_t size = children[c].size;
      if (size == 0 || size > remaining) continue;
      shape.children.push_back(c);
      shape.size += size;
      add_children(depth, shape, c, remaining - size);
      shape.children.pop_back();
      shape.size -= size;
    }
  }

  template <typename F>
  void for_each_multiset(std::size_t budget, std::vector<std::size_t>& current, F&& emit) {
    emit(current);
    if (current.size() == budget) return;
    const std::size_t start = current.empty() ? 0 : current.back();
    for (std::size_t l = start; l < labels_; ++l) {
      current.push_back(l);
      for_each_multiset(budget, current, emit);
      current.pop_back();
    }
  }

  std::size_t labels_;
  std::vector<std::vector<Shape>> levels_;
};

Situation materialize(const ShapeTable& table, std::size_t depth, const Shape& shape,
                      std::span<const std::string> roles, std::size_t& next_situation,
                      std::size_t& next_entity) {
  Situation s;
  s.id = "s" + std::to_string(next_situation++);
  for (auto label : shape.labels) {
    s.entities.push_back({"e" + std::to_string(++next_entity), {roles[label]}});
  }
  for (auto child : shape.children) {
    s.situations.push_back(
        materialize(table, depth - 1, table.level(depth - 1)[child], roles, next_situation, next_entity));
  }
  return s;
}

}  // namespace

std::vector<Situation> enumerate_situations(std::span<const std::string> roles,
                                            std::size_t max_entities, std::size_t max_depth) {
  const ShapeTable table(roles.size(), max_entities, max_depth);
  std::vector<Situation> out;
  out.reserve(table.level(max_depth).size());
  for (const auto& shape : table.level(max_depth)) {
    std::size_t next_situation = 0;
    std::size_t next_entity = 0;
    out.push_back(materialize(table, max_depth, shape, roles, next_situation, next_entity));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gradient check

GradcheckResult gradcheck(const Encoder& encoder, const BasisMap& bases, std::size_t trials,
                          std::uint64_t seed, double step, double min_coefficient) {
  const Ontology& o = encoder.ontology();
  const auto n = static_cast<Eigen::Index>(o.dim());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  auto forward = [&](const Vector& v) {
    const auto values = deduce(o, bases, v, Activation::Relu).values;
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())).eval();
  };
  auto away_from_kinks = [&](const Vector& v) {
    for (const auto& report : satisfy_all(o, bases, v, Activation::Relu)) {
      if ((report.coefficients.array().abs() <= min_coefficient).any()) return false;
    }
    return true;
  };

  GradcheckResult result;
  const std::size_t max_attempts = 1000 * std::max<std::size_t>(trials, 1);
  std::size_t attempts = 0;
  while (result.trials < trials && attempts < max_attempts) {
    ++attempts;
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(rng);
    if (!away_from_kinks(v)) {
      ++result.rejected;
      continue;
    }
    const Matrix analytic = jacobian(o, bases, v).jacobian;
    Matrix numeric(analytic.rows(), analytic.cols());
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector plus = v, minus = v;
      plus(j) += step;
      minus(j) -= step;
      numeric.col(j) = (forward(plus) - forward(minus)) / (2.0 * step);
    }
    const double diff = (analytic - numeric).norm();
    const double scale = numeric.norm();
    const double rel = diff == 0.0 ? 0.0 : diff / std::max(scale, 1e-12);
    result.max_relative_error = std::max(result.max_relative_error, rel);
    ++result.trials;
  }
  return result;
}

}  // namespace dnsvec
