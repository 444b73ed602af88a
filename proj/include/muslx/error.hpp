#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace muslx {

enum class ErrorCode {
  invalid_argument,
  shape_mismatch,
  bracket_exhausted,
  modular_overflow,
  norm_not_found,
  newton_diverged,
  nonfinite_state,
  no_contraction,
  mode_mismatch,
  misaligned_breakpoint,
  empty_input,
  config,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace muslx
