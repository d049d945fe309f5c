#pragma once

#include <stdexcept>
#include <string>

namespace crmimo {

enum class ErrorKind {
  InvalidInput,
  NotPositiveDefinite,
  SchemaError,
  DimensionMismatch,
  AllZeroAuxiliaries,
  DegenerateStream,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::AllZeroAuxiliaries: return "AllZeroAuxiliaries";
    case ErrorKind::DegenerateStream: return "DegenerateStream";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` tells callers what failed.
/// For SchemaError the `detail()` carries the offending field path.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
        kind_(kind),
        detail_(std::move(detail)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace crmimo
