#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bloombench {

enum class ErrorCode {
  // raster store
  MissingHeader,
  MalformedHeader,
  MissingBandFile,
  BandSizeMismatch,
  NonFiniteSample,
  DuplicateBandName,
  UnknownBand,
  RootNotFound,
  // masks
  RunSumMismatch,
  MalformedRle,
  MalformedImage,
  DimensionMismatch,
  // segmentation engine
  InvalidPrompts,
  DegeneratePrompts,
  InvalidArgument,
  // severity
  InvalidDensity,
  InvalidLevel,
  MalformedLabels,
  LengthMismatch,
  EmptyInput,
  // losses
  EmptySequence,
  // triplets
  TooFewTemplates,
  IoError,
  MalformedLine,
  // curation
  UnknownScene,
  UnknownSession,
  SessionClosed,
  NoCandidates,
  BadCandidateIndex,
  MalformedMask,
  MalformedRequest,
  ExportPathUnwritable,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library-wide exception. `what()` reads "<Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail, std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  /// 1-based line number for line-oriented formats (JSONL, CSV).
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<std::size_t> line_;
};

}  // namespace bloombench
