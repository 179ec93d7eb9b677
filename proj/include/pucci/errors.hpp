#pragma once

#include <stdexcept>
#include <string>

namespace pucci {

// One code per failure mode the library can report.
enum class errc {
  non_positive_ellipticity,
  lambda_order,
  dimension_too_small,
  weight_too_negative,
  degenerate_dimension_like,
  p_below_one,
  outside_domain,
  on_interface,
  open_curve,
  self_intersection,
  m_not_in_quadrant,
  step_size_underflow,
  saddle_unavailable,
  no_return,
  empty_trajectory,
  non_positive_xz,
  vanishing_derivative,
  unresolved_fate,
  wrong_region,
  bracket_failure,
  unresolved,
  invalid_argument,
};

const char* errc_name(errc code);

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw error(code, what); }

}  // namespace pucci
