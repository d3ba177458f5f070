#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dnsvec/ontology.hpp"

namespace dnsvec {

/// Synthetic ontology families for timing basis construction.
///
///  chain  - description i contains description i-1 and one role of its own.
///  tree   - descriptions form a balanced binary composition tree; roles form
///           the matching binary subsumption tree.
///  dense  - a pool of roles whose subsumption graph is a random DAG with edge
///           probability 0.2; each description owns one role and draws three
///           pool roles plus, with probability 0.5, one earlier description.
enum class SyntheticShape { Chain, Tree, Dense };

std::optional<SyntheticShape> parse_shape(std::string_view name);
std::string_view to_string(SyntheticShape shape);

/// Deterministic for a given (shape, descriptions, seed).
std::vector<Declaration> synthetic_ontology(SyntheticShape shape, std::size_t descriptions,
                                            std::uint64_t seed);

struct BenchRow {
  std::size_t descriptions = 0;
  std::size_t dim = 0;
  std::size_t columns = 0;  // sum of |d|
  double seconds = 0.0;     // best of the repeats: encoder + all bases
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::optional<double> exponent;  // log-log slope of seconds against |D|
};

/// Least-squares slope of log(y) on log(x); nullopt with fewer than two
/// distinct x values.
std::optional<double> fit_loglog(std::span<const double> x, std::span<const double> y);

BenchResult run_bench(std::span<const std::size_t> sizes, SyntheticShape shape, std::uint64_t seed,
                      int repeats = 5);

}  // namespace dnsvec
