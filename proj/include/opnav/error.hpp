#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace opnav {

enum class ErrorCode {
  // knowledge model
  MalformedMarkup,
  DuplicateId,
  DanglingReference,
  MultipleRoots,
  // search
  EmptyQuery,
  // assistant
  SessionEnded,
  EmptyQuestion,
  UnknownNode,
  IllegalTransition,
  InvalidTimestamp,
  InvalidEvent,
  StorageFailure,
  // analytics
  EmptyInput,
  InsufficientData,
  DegenerateData,
  EmptySample,
  ExactWithTies,
  OutOfRange,
  InvalidArgument,
  // configuration / io
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type carried through the library. The code is the
/// machine-readable part; `what()` holds a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace opnav
