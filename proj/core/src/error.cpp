#include "opgram/error.hpp"

namespace opgram {

std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnknownMnemonic: return "UnknownMnemonic";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::MalformedSmali: return "MalformedSmali";
    case ErrorKind::BadHexToken: return "BadHexToken";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::MissingFamily: return "MissingFamily";
    case ErrorKind::EmptyDistribution: return "EmptyDistribution";
    case ErrorKind::EmptyClass: return "EmptyClass";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ModeMismatch: return "ModeMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::MissingLevel: return "MissingLevel";
    case ErrorKind::TooFewInstances: return "TooFewInstances";
    case ErrorKind::HashMismatch: return "HashMismatch";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

}  // namespace opgram
