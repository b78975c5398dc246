#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spmvprobe {

enum class ErrorKind {
  dimension_mismatch,
  capacity_exceeded,
  infeasible,
  undefined_for_empty,
  parse_error,
  unsupported_field,
  io_error,
  version_mismatch,
  empty_input,
  unknown_feature,
  correctness_failure,
  invalid_argument,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::capacity_exceeded: return "capacity-exceeded";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::undefined_for_empty: return "undefined-for-empty";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::unsupported_field: return "unsupported-field";
    case ErrorKind::io_error: return "io-error";
    case ErrorKind::version_mismatch: return "version-mismatch";
    case ErrorKind::empty_input: return "empty-input";
    case ErrorKind::unknown_feature: return "unknown-feature";
    case ErrorKind::correctness_failure: return "correctness-failure";
    case ErrorKind::invalid_argument: return "invalid-argument";
  }
  return "unknown";
}

}  // namespace spmvprobe
