#pragma once

#include <stdexcept>
#include <string>

namespace moran {

enum class ErrorCode {
  invalid_argument,
  out_of_horizon,
  invalid_spec,
  overflow,
  no_feasible_window,
  unbounded_sequence,
  no_parameters,
  divisibility,
  horizon_limited,
  parse_error,
};

const char* to_string(ErrorCode code);

/// Every module reports failures through this exception; the CLI turns it
/// into a machine-readable error object.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace moran
