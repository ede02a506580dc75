#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace utilrank {

enum class ErrorCode {
  EmptyDocument,
  MalformedPageMarker,
  MalformedFrontMatter,
  InvalidUtf8,
  UnclosedTable,
  DuplicateSegmentId,
  ProviderUnavailable,
  DimensionMismatch,
  MalformedVerdict,
  ModelUnavailable,
  MissingVerdict,
  InvalidThreshold,
  InvalidParams,
  InvalidConfig,
  StoreUnavailable,
  RunNotFound,
  CorruptRecord,
  NoGoldLabels,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable error code. The what() string is
/// "<CodeName>: <message>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace utilrank
