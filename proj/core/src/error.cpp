#include "egoview/error.hpp"

#include <utility>

namespace egoview {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ContractViolation: return "ContractViolation";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::InvalidSample: return "InvalidSample";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::NoValidDepth: return "NoValidDepth";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ProcessError: return "ProcessError";
  }
  return "Unknown";
}

ParseError::ParseError(std::string path, std::size_t offset, const std::string& what)
    : Error(ErrorCode::ParseError,
            path + ": byte " + std::to_string(offset) + ": " + what),
      path_(std::move(path)),
      offset_(offset) {}

ValidationError::ValidationError(std::string field, const std::string& what)
    : Error(ErrorCode::ValidationError, "field '" + field + "': " + what),
      field_(std::move(field)) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace egoview
