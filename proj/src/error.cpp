#include "utilrank/error.hpp"

namespace utilrank {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::MalformedPageMarker: return "MalformedPageMarker";
    case ErrorCode::MalformedFrontMatter: return "MalformedFrontMatter";
    case ErrorCode::InvalidUtf8: return "InvalidUtf8";
    case ErrorCode::UnclosedTable: return "UnclosedTable";
    case ErrorCode::DuplicateSegmentId: return "DuplicateSegmentId";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MalformedVerdict: return "MalformedVerdict";
    case ErrorCode::ModelUnavailable: return "ModelUnavailable";
    case ErrorCode::MissingVerdict: return "MissingVerdict";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::StoreUnavailable: return "StoreUnavailable";
    case ErrorCode::RunNotFound: return "RunNotFound";
    case ErrorCode::CorruptRecord: return "CorruptRecord";
    case ErrorCode::NoGoldLabels: return "NoGoldLabels";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace utilrank
