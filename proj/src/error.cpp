#include "autojournal/error.hpp"

namespace autojournal {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DirectoryUnreadable: return "DirectoryUnreadable";
    case ErrorCode::NoValidFrames: return "NoValidFrames";
    case ErrorCode::TimestampUnparseable: return "TimestampUnparseable";
    case ErrorCode::EmptyStream: return "EmptyStream";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::FrameExceedsLimit: return "FrameExceedsLimit";
    case ErrorCode::EncoderUnavailable: return "EncoderUnavailable";
    case ErrorCode::WriteFailed: return "WriteFailed";
    case ErrorCode::UnboundPlaceholder: return "UnboundPlaceholder";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::UploadFailed: return "UploadFailed";
    case ErrorCode::NoJsonFound: return "NoJsonFound";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::TooManyEntries: return "TooManyEntries";
    case ErrorCode::FileUnreadable: return "FileUnreadable";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyJournal: return "EmptyJournal";
    case ErrorCode::AssignmentMismatch: return "AssignmentMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingGroundTruth: return "MissingGroundTruth";
    case ErrorCode::MissingPrediction: return "MissingPrediction";
    case ErrorCode::MalformedReport: return "MalformedReport";
  }
  return "Unknown";
}

}  // namespace autojournal
