// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace weylab {

enum class ErrorCode {
  invalid_argument = 1,
  dimension_mismatch,
  evaluation_fault,
  out_of_domain,
  config,
  resolution,
  confinement,
  containment,
  numerical,
  incomplete,
  hypothesis,
  degenerate,
  io,
  unknown_experiment,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::evaluation_fault: return "evaluation_fault";
    case ErrorCode::out_of_domain: return "out_of_domain";
    case ErrorCode::config: return "config";
    case ErrorCode::resolution: return "resolution";
    case ErrorCode::confinement: return "confinement";
    case ErrorCode::containment: return "containment";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::incomplete: return "incomplete";
    case ErrorCode::hypothesis: return "hypothesis";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::io: return "io";
    case ErrorCode::unknown_experiment: return "unknown_experiment";
  }
  return "unknown";
}

}  // namespace weylab
