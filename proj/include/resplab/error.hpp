#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace resplab {

enum class ErrorCode {
  MalformedContainer,
  UnsupportedEncoding,
  EmptyAudio,
  OutOfRange,
  TooShort,
  EmptyTile,
  InvalidParams,
  IoFailure,
  InvalidInterval,
  OverlapViolation,
  ClassTrackMismatch,
  NotFound,
  SchemaViolation,
  SequenceGap,
  CorruptJournal,
  Locked,
  InvalidUserId,
  InvalidHorizon,
  ConfigInvalid,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; `code()` carries the
// category callers branch on, `what()` the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace resplab
