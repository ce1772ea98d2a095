#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hplateau {

enum class Errc {
  not_associative,
  no_identity,
  no_inverse,
  out_of_range,
  infeasible_class,
  unknown_class,
  invalid_spectrum,
  odd_point_count,
  cap_exceeded,
  degenerate_spec,
  max_iterations,
  projection_out_of_reach,
  off_manifold_value,
  ball_outside_domain,
  loop_hits_singular_set,
  points_not_on_boundary,
  seminorm_zero,
  config_error,
  io_error,
  parse_error,
  invalid_argument,
};

std::string_view to_string(Errc code) noexcept;

// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace hplateau
