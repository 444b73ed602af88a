#include <muslx/error.hpp>

namespace muslx {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::shape_mismatch: return "shape_mismatch";
    case ErrorCode::bracket_exhausted: return "bracket_exhausted";
    case ErrorCode::modular_overflow: return "modular_overflow";
    case ErrorCode::norm_not_found: return "norm_not_found";
    case ErrorCode::newton_diverged: return "newton_diverged";
    case ErrorCode::nonfinite_state: return "nonfinite_state";
    case ErrorCode::no_contraction: return "no_contraction";
    case ErrorCode::mode_mismatch: return "mode_mismatch";
    case ErrorCode::misaligned_breakpoint: return "misaligned_breakpoint";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::config: return "config";
  }
  return "unknown";
}

}  // namespace muslx
