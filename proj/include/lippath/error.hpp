#pragma once

#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lippath {

enum class Errc {
  invalid_domain,
  infeasible_spec,
  depth_overflow,
  depth_mismatch,
  value_outside_interval,
  path_violates_lipschitz,
  junction_mismatch,
  invalid_horizon,
  time_out_of_range,
  event_time_not_on_grid,
  non_probability_measure,
  unbounded_initial_constraint,
  dimension_too_large,
  degenerate_interval,
  parse_error,
};

constexpr std::string_view to_string(Errc e) noexcept {
  switch (e) {
    case Errc::invalid_domain: return "invalid-domain";
    case Errc::infeasible_spec: return "infeasible-spec";
    case Errc::depth_overflow: return "depth-overflow";
    case Errc::depth_mismatch: return "depth-mismatch";
    case Errc::value_outside_interval: return "value-outside-interval";
    case Errc::path_violates_lipschitz: return "path-violates-Lipschitz";
    case Errc::junction_mismatch: return "junction-mismatch";
    case Errc::invalid_horizon: return "invalid-horizon";
    case Errc::time_out_of_range: return "time-out-of-range";
    case Errc::event_time_not_on_grid: return "event-time-not-on-grid";
    case Errc::non_probability_measure: return "non-probability-measure";
    case Errc::unbounded_initial_constraint: return "unbounded-initial-constraint";
    case Errc::dimension_too_large: return "dimension-too-large";
    case Errc::degenerate_interval: return "degenerate-interval";
    case Errc::parse_error: return "parse-error";
  }
  return "unknown";
}

/// Shortest decimal form that reads back as the same double.
inline std::string exact(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace lippath
