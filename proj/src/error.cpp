#include "bloombench/error.hpp"

namespace bloombench {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MissingBandFile: return "MissingBandFile";
    case ErrorCode::BandSizeMismatch: return "BandSizeMismatch";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::DuplicateBandName: return "DuplicateBandName";
    case ErrorCode::UnknownBand: return "UnknownBand";
    case ErrorCode::RootNotFound: return "RootNotFound";
    case ErrorCode::RunSumMismatch: return "RunSumMismatch";
    case ErrorCode::MalformedRle: return "MalformedRle";
    case ErrorCode::MalformedImage: return "MalformedImage";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidPrompts: return "InvalidPrompts";
    case ErrorCode::DegeneratePrompts: return "DegeneratePrompts";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidDensity: return "InvalidDensity";
    case ErrorCode::InvalidLevel: return "InvalidLevel";
    case ErrorCode::MalformedLabels: return "MalformedLabels";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::TooFewTemplates: return "TooFewTemplates";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::UnknownScene: return "UnknownScene";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::SessionClosed: return "SessionClosed";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::BadCandidateIndex: return "BadCandidateIndex";
    case ErrorCode::MalformedMask: return "MalformedMask";
    case ErrorCode::MalformedRequest: return "MalformedRequest";
    case ErrorCode::ExportPathUnwritable: return "ExportPathUnwritable";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& detail, std::optional<std::size_t> line) {
  std::string msg(to_string(code));
  if (line) msg += "(" + std::to_string(*line) + ")";
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

Error::Error(ErrorCode code, std::string detail, std::optional<std::size_t> line)
    : std::runtime_error(compose(code, detail, line)), code_(code), detail_(std::move(detail)), line_(line) {}

}  // namespace bloombench
