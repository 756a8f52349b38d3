#include "opnav/error.hpp"

namespace opnav {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedMarkup: return "MalformedMarkup";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::MultipleRoots: return "MultipleRoots";
    case ErrorCode::EmptyQuery: return "EmptyQuery";
    case ErrorCode::SessionEnded: return "SessionEnded";
    case ErrorCode::EmptyQuestion: return "EmptyQuestion";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::InvalidTimestamp: return "InvalidTimestamp";
    case ErrorCode::InvalidEvent: return "InvalidEvent";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::ExactWithTies: return "ExactWithTies";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace opnav
