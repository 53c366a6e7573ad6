#include "tdaf/errors.hpp"

namespace tdaf {

const char* category_name(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Structural: return "structural";
    case ErrorCategory::Parameter: return "parameter";
    case ErrorCategory::Solver: return "solver";
    case ErrorCategory::Newton: return "newton";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::Internal: return "internal";
  }
  return "internal";
}

}  // namespace tdaf
