#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace autojournal {

enum class ErrorCode {
  // ingest
  DirectoryUnreadable,
  NoValidFrames,
  TimestampUnparseable,
  EmptyStream,
  InvalidArgument,
  // chunker
  FrameExceedsLimit,
  // video
  EncoderUnavailable,
  WriteFailed,
  // gateway
  UnboundPlaceholder,
  ProviderError,
  PayloadTooLarge,
  Timeout,
  UploadFailed,
  // journal
  NoJsonFound,
  SchemaViolation,
  TooManyEntries,
  FileUnreadable,
  // evaluator
  DimensionMismatch,
  EmptyJournal,
  AssignmentMismatch,
  // pipeline
  ConfigError,
  MissingGroundTruth,
  MissingPrediction,
  MalformedReport,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; the code carries the failure kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace autojournal
