#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace egoview {

enum class ErrorCode {
  ContractViolation,
  EmptyRegion,
  InvalidSample,
  InsufficientPoints,
  DegenerateConfiguration,
  NoValidDepth,
  ParseError,
  ValidationError,
  IoError,
  ProcessError,
};

/// Stable machine-readable name, e.g. "EmptyRegion".
std::string_view to_string(ErrorCode code);

/// Base for every error raised by the library. `code()` is what the CLI
/// reports on stderr.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Malformed file content. Carries the offending path and the byte offset
/// where parsing stopped.
class ParseError : public Error {
 public:
  ParseError(std::string path, std::size_t offset, const std::string& what);

  const std::string& path() const noexcept { return path_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string path_;
  std::size_t offset_;
};

/// Well-formed content that violates a domain invariant. `field()` names it.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what);

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::ContractViolation, message);
}

}  // namespace egoview
