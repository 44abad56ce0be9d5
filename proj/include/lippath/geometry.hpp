#pragma once

// Cone geometry for Lipschitz bridges.
//
// A bridge is a Lipschitz path on [r, s] pinned at x(r) = a and x(s) = b with
// constant c. The set of admissible (t, x) points is the intersection of the
// forward cone from (r, a) and the backward cone from (s, b). Only the derived
// predicates and the vertical slices of that region are computed here.

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lippath/error.hpp"

namespace lippath {

struct BridgeSpec {
  double r = 0.0;
  double s = 1.0;
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;

  double width() const noexcept { return c * (s - r); }
  double midtime() const noexcept { return 0.5 * (r + s); }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  bool contains(double x, double tol = 0.0) const noexcept { return x >= lo - tol && x <= hi + tol; }
  bool degenerate(double tol = 0.0) const noexcept { return hi - lo <= tol; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Slack admitted on the feasibility boundary |b - a| = c (s - r).
inline double feasibility_tolerance(double r, double s, double c) noexcept {
  return 1e-12 * std::max(1.0, c * (s - r));
}

inline double feasibility_tolerance(const BridgeSpec& spec) noexcept {
  return feasibility_tolerance(spec.r, spec.s, spec.c);
}

inline void check_domain(double r, double s, double c) {
  if (!(r >= 0.0) || !(r < s) || !std::isfinite(s)) {
    std::ostringstream os;
    os << "time interval requires 0 <= r < s (r=" << r << ", s=" << s << ")";
    throw Error(Errc::invalid_domain, os.str());
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    std::ostringstream os;
    os << "Lipschitz constant must be positive and finite (c=" << c << ")";
    throw Error(Errc::invalid_domain, os.str());
  }
}

inline bool feasible(double r, double s, double a, double b, double c) {
  check_domain(r, s, c);
  return std::abs(b - a) <= c * (s - r) + feasibility_tolerance(r, s, c);
}

inline bool feasible(const BridgeSpec& spec) {
  return feasible(spec.r, spec.s, spec.a, spec.b, spec.c);
}

inline void require_feasible(const BridgeSpec& spec) {
  if (!std::isfinite(spec.a) || !std::isfinite(spec.b)) {
    throw Error(Errc::invalid_domain, "bridge endpoint values must be finite");
  }
  if (!feasible(spec)) {
    std::ostringstream os;
    os << "bridge needs |b - a| <= c (s - r), got |b - a| = " << exact(std::abs(spec.b - spec.a))
       << " > c (s - r) = " << exact(spec.width());
    throw Error(Errc::infeasible_spec, os.str());
  }
}

namespace detail {

// Unchecked form of midpoint_interval for inner loops on specs that are
// feasible by construction.
inline Interval midpoint_interval_unchecked(const BridgeSpec& spec) noexcept {
  const double half = 0.5 * spec.width();
  Interval iv = spec.a <= spec.b ? Interval{spec.b - half, spec.a + half}
                                 : Interval{spec.a - half, spec.b + half};
  if (iv.lo > iv.hi) {
    // Rounding on the feasibility boundary; the exact interval is a point.
    const double mid = 0.5 * (iv.lo + iv.hi);
    iv = {mid, mid};
  }
  return iv;
}

}  // namespace detail

/// Admissible values of x((r + s) / 2) for the bridge.
inline Interval midpoint_interval(const BridgeSpec& spec) {
  require_feasible(spec);
  return detail::midpoint_interval_unchecked(spec);
}

/// Whether d can be the midpoint value: both half-bridges stay feasible.
inline bool midpoint_feasible(const BridgeSpec& spec, double d) {
  require_feasible(spec);
  const double u = spec.midtime();
  const double tol = feasibility_tolerance(spec);
  return std::abs(d - spec.a) <= spec.c * (u - spec.r) + tol &&
         std::abs(d - spec.b) <= spec.c * (spec.s - u) + tol;
}

/// Admissible values of x(s) when only x(r) = a is pinned.
inline Interval free_interval(double r, double s, double a, double c) {
  check_domain(r, s, c);
  const double w = c * (s - r);
  return {a - w, a + w};
}

}  // namespace lippath
