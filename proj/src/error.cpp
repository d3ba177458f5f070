#include "dnsvec/error.hpp"

namespace dnsvec {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::UnknownReference: return "UnknownReference";
    case ErrorKind::EmptyDescription: return "EmptyDescription";
    case ErrorKind::CompositionCycle: return "CompositionCycle";
    case ErrorKind::SubsumptionCycle: return "SubsumptionCycle";
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::DuplicateEntityId: return "DuplicateEntityId";
    case ErrorKind::UnknownRole: return "UnknownRole";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MissingBasis: return "MissingBasis";
    case ErrorKind::UnknownDescription: return "UnknownDescription";
  }
  return "Unknown";
}

}  // namespace dnsvec
