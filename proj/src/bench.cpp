#include "dnsvec/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>

#include "dnsvec/encoder.hpp"

namespace dnsvec {

namespace {

std::string numbered(char prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%05zu", prefix, i);
  return buf;
}

Declaration role(std::string name, std::vector<std::string> parents = {}) {
  return {ElementKind::Role, std::move(name), std::move(parents), {}, std::nullopt};
}

Declaration description(std::string name, std::vector<std::string> components) {
  return {ElementKind::Description, std::move(name), {}, std::move(components), std::nullopt};
}

std::vector<Declaration> chain(std::size_t n) {
  std::vector<Declaration> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(role(numbered('R', i)));
    std::vector<std::string> parts;
    if (i > 0) parts.push_back(numbered('D', i - 1));
    parts.push_back(numbered('R', i));
    out.push_back(description(numbered('D', i), std::move(parts)));
  }
  return out;
}

std::vector<Declaration> tree(std::size_t n) {
  std::vector<Declaration> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> parents;
    if (i > 0) parents.push_back(numbered('R', (i - 1) / 2));
    out.push_back(role(numbered('R', i), std::move(parents)));
    std::vector<std::string> parts;
    for (std::size_t child : {2 * i + 1, 2 * i + 2}) {
      if (child < n) parts.push_back(numbered('D', child));
    }
    parts.push_back(numbered('R', i));
    out.push_back(description(numbered('D', i), std::move(parts)));
  }
  return out;
}

std::vector<Declaration> dense(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(0.2);
  std::bernoulli_distribution nested(0.5);
  std::vector<Declaration> out;

  const std::size_t pool = std::max<std::size_t>(n, 4);
  for (std::size_t i = 0; i < pool; ++i) {
    std::vector<std::string> parents;
    for (std::size_t j = 0; j < i; ++j) {
      if (edge(rng)) parents.push_back(numbered('P', j));
    }
    out.push_back(role(numbered('P', i), std::move(parents)));
  }
  std::uniform_int_distribution<std::size_t> pick_pool(0, pool - 1);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(role(numbered('R', i)));
    std::vector<std::string> parts{numbered('R', i)};
    std::set<std::size_t> drawn;
    while (drawn.size() < 3) drawn.insert(pick_pool(rng));
    for (auto p : drawn) parts.push_back(numbered('P', p));
    if (i > 0 && nested(rng)) {
      std::uniform_int_distribution<std::size_t> pick_earlier(0, i - 1);
      parts.push_back(numbered('D', pick_earlier(rng)));
    }
    out.push_back(description(numbered('D', i), std::move(parts)));
  }
  return out;
}

}  // namespace

std::optional<SyntheticShape> parse_shape(std::string_view name) {
  if (name == "chain") return SyntheticShape::Chain;
  if (name == "tree") return SyntheticShape::Tree;
  if (name == "dense") return SyntheticShape::Dense;
  return std::nullopt;
}

std::string_view to_string(SyntheticShape shape) {
  switch (shape) {
    case SyntheticShape::Chain: return "chain";
    case SyntheticShape::Tree: return "tree";
    case SyntheticShape::Dense: return "dense";
  }
  return "chain";
}

std::vector<Declaration> synthetic_ontology(SyntheticShape shape, std::size_t descriptions,
                                            std::uint64_t seed) {
  switch (shape) {
    case SyntheticShape::Chain: return chain(descriptions);
    case SyntheticShape::Tree: return tree(descriptions);
    case SyntheticShape::Dense: return dense(descriptions, seed);
  }
  return {};
}

std::optional<double> fit_loglog(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

BenchResult run_bench(std::span<const std::size_t> sizes, SyntheticShape shape, std::uint64_t seed,
                      int repeats) {
  using Clock = std::chrono::steady_clock;
  BenchResult result;
  for (auto size : sizes) {
    const auto decls = synthetic_ontology(shape, size, seed);
    const Ontology o = Ontology::build(decls);
    BenchRow row;
    row.descriptions = size;
    row.dim = o.dim();
    for (auto d : o.descriptions()) row.columns += o.components(d).size();

    double best = INFINITY;
    for (int r = 0; r < std::max(repeats, 1); ++r) {
      const auto start = Clock::now();
      const Encoder encoder(o);
      const BasisMap bases = encoder.build_all_bases();
      const std::chrono::duration<double> elapsed = Clock::now() - start;
      if (bases.size() != o.description_count()) throw std::logic_error("missing bases");
      best = std::min(best, elapsed.count());
    }
    row.seconds = best;
    result.rows.push_back(row);
  }

  std::vector<double> xs, ys;
  for (const auto& row : result.rows) {
    xs.push_back(static_cast<double>(row.descriptions));
    ys.push_back(std::max(row.seconds, 1e-9));
  }
  std::set<double> distinct(xs.begin(), xs.end());
  if (distinct.size() >= 2) result.exponent = fit_loglog(xs, ys);
  return result;
}

}  // namespace dnsvec
