#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bslab {

enum class ErrorCode {
  parameter_out_of_range,
  no_fiber_edges,
  invalid_vertex,
  invalid_graph,
  size_cap_exceeded,
  radius_mismatch,
  cutoff_too_small,
  empty_boundary,
  non_crossing_curve,
  insufficient_bulk,
  all_zero_profile,
  solver_non_convergence,
  config_invalid,
  io_failure,
  unknown_pair,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library is reported as an Error carrying
/// a machine-readable code next to the human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace bslab
