#include "resplab/error.hpp"

namespace resplab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedContainer: return "MalformedContainer";
    case ErrorCode::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::EmptyAudio: return "EmptyAudio";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::EmptyTile: return "EmptyTile";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::OverlapViolation: return "OverlapViolation";
    case ErrorCode::ClassTrackMismatch: return "ClassTrackMismatch";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::SequenceGap: return "SequenceGap";
    case ErrorCode::CorruptJournal: return "CorruptJournal";
    case ErrorCode::Locked: return "Locked";
    case ErrorCode::InvalidUserId: return "InvalidUserId";
    case ErrorCode::InvalidHorizon: return "InvalidHorizon";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

}  // namespace resplab
