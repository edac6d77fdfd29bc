#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mbf {

enum class ErrorKind {
  Parse,
  RejectedRow,
  Io,
  Config,
  Split,
  Balance,
  Simulation,
  Precondition,
  Fit,
  Transform,
  Fusion,
  Metric,
  Comparison,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::RejectedRow: return "rejected_row";
    case ErrorKind::Io: return "io";
    case ErrorKind::Config: return "config";
    case ErrorKind::Split: return "split";
    case ErrorKind::Balance: return "balance";
    case ErrorKind::Simulation: return "simulation";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::Transform: return "transform";
    case ErrorKind::Fusion: return "fusion";
    case ErrorKind::Metric: return "metric";
    case ErrorKind::Comparison: return "comparison";
  }
  return "unknown";
}

/// Single exception type for the library; `kind()` tells callers which stage failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mbf
