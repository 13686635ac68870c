#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace opgram {

enum class ErrorKind {
  UnknownMnemonic,
  EmptyInput,
  MalformedSmali,
  BadHexToken,
  IoError,
  DuplicateId,
  MissingFamily,
  EmptyDistribution,
  EmptyClass,
  DimensionMismatch,
  ModeMismatch,
  LengthMismatch,
  MissingLevel,
  TooFewInstances,
  HashMismatch,
  FormatError,
  InvalidArgument,
};

std::string_view error_kind_name(ErrorKind kind) noexcept;

/// All library failures are reported as an Error carrying a machine-checkable
/// kind and a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace opgram
