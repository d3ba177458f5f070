#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dnsvec {

/// Position of a token in a source text. Lines and columns are 1-based.
struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class ErrorKind {
  DuplicateName,
  UnknownReference,
  EmptyDescription,
  CompositionCycle,
  SubsumptionCycle,
  KindMismatch,
  SyntaxError,
  SchemaError,
  DuplicateEntityId,
  UnknownRole,
  RankDeficient,
  NonFinite,
  DimensionMismatch,
  MissingBasis,
  UnknownDescription,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `span` is set for errors that can be
/// traced back to a location in an ontology source text; `path` names the
/// offending node of a structured document.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<SourceSpan> span = std::nullopt, std::string path = {})
      : std::runtime_error(message), kind_(kind), span_(span), path_(std::move(path)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::optional<SourceSpan>& span() const noexcept { return span_; }
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorKind kind_;
  std::optional<SourceSpan> span_;
  std::string path_;
};

}  // namespace dnsvec
