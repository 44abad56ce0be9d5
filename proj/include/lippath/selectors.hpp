#pragma once

// Selector families: continuous surjections from [0, 1] onto the admissible
// interval of a midpoint or free endpoint, and from the reals onto the reals
// for the initial value.
//
// The constructions in bridge.hpp and extensions.hpp are templates over these
// concepts. The affine instances push Uniform[0, 1] forward to the uniform
// distribution on each interval; any other continuous monotone surjection can
// be plugged in, but only the affine ones produce the uniform measure.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <sstream>

#include "lippath/error.hpp"
#include "lippath/geometry.hpp"

namespace lippath {

template <class S>
concept BridgeSelector = requires(const S& sel, const BridgeSpec& spec, double xi) {
  { sel(spec, xi) } -> std::convertible_to<double>;
};

template <class S>
concept InvertibleBridgeSelector = BridgeSelector<S> && requires(const S& sel, const BridgeSpec& spec, double d) {
  { sel.invert(spec, d) } -> std::convertible_to<double>;
};

template <class S>
concept FreeEndpointSelector = requires(const S& sel, double a, double r, double s, double c, double xi) {
  { sel(a, r, s, c, xi) } -> std::convertible_to<double>;
};

template <class S>
concept InvertibleFreeEndpointSelector =
    FreeEndpointSelector<S> && requires(const S& sel, double a, double r, double s, double c, double d) {
      { sel.invert(a, r, s, c, d) } -> std::convertible_to<double>;
    };

template <class S>
concept InitialSelector = requires(const S& sel, double xi) {
  { sel(xi) } -> std::convertible_to<double>;
};

template <class S>
concept InvertibleInitialSelector = InitialSelector<S> && requires(const S& sel, double x) {
  { sel.invert(x) } -> std::convertible_to<double>;
};

/// Relative slack for inverting values that sit just outside their interval.
inline constexpr double kInversionTolerance = 1e-9;

inline void check_unit(double xi) {
  if (!(xi >= 0.0 && xi <= 1.0)) {
    std::ostringstream os;
    os << "selector argument must lie in [0, 1] (got " << xi << ")";
    throw Error(Errc::invalid_domain, os.str());
  }
}

namespace detail {

inline double clamp_unit(double xi) noexcept { return xi < 0.0 ? 0.0 : (xi > 1.0 ? 1.0 : xi); }

[[noreturn]] inline void throw_outside(double d, const Interval& iv) {
  std::ostringstream os;
  os << "value " << exact(d) << " is outside [" << exact(iv.lo) << ", " << exact(iv.hi) << "]";
  throw Error(Errc::value_outside_interval, os.str());
}

}  // namespace detail

/// Affine midpoint selector: lo + (hi - lo) xi on the midpoint interval.
struct AffineBridgeSelector {
  double operator()(const BridgeSpec& spec, double xi) const noexcept {
    const double w = spec.width();
    // the slope is >= 0 exactly; rounding on the feasibility boundary can make it a tiny negative
    if (spec.a <= spec.b) return std::max(0.0, (spec.a - spec.b) + w) * xi + spec.b - 0.5 * w;
    return std::max(0.0, (spec.b - spec.a) + w) * xi + spec.a - 0.5 * w;
  }

  // Degenerate intervals map back to 0. Values within `tol` of the interval
  // are accepted and the result is clamped to [0, 1].
  double invert(const BridgeSpec& spec, double d, double rel_tol = kInversionTolerance) const {
    const Interval iv = detail::midpoint_interval_unchecked(spec);
    const double tol = rel_tol * std::max(1.0, spec.width());
    if (!iv.contains(d, tol)) detail::throw_outside(d, iv);
    if (iv.degenerate(feasibility_tolerance(spec))) return 0.0;
    return detail::clamp_unit((d - iv.lo) / iv.width());
  }
};

/// Affine free-endpoint selector onto [a - c(s - r), a + c(s - r)].
struct AffineFreeSelector {
  double operator()(double a, double r, double s, double c, double xi) const noexcept {
    const double w = c * (s - r);
    return 2.0 * w * xi + a - w;
  }

  double invert(double a, double r, double s, double c, double d, double rel_tol = kInversionTolerance) const {
    const double w = c * (s - r);
    const Interval iv{a - w, a + w};
    if (!iv.contains(d, rel_tol * std::max(1.0, w))) detail::throw_outside(d, iv);
    return detail::clamp_unit((d - a + w) / (2.0 * w));
  }
};

/// Identity initial selector; proper, so Lebesgue windows stay finite.
struct IdentityInitialSelector {
  double operator()(double xi) const noexcept { return xi; }
  double invert(double x) const noexcept { return x; }
};

/// Smoothstep reparametrization of the midpoint interval. Continuous and onto
/// but not measure-preserving; exists to exercise selector pluggability.
struct SmoothstepBridgeSelector {
  double operator()(const BridgeSpec& spec, double xi) const noexcept {
    const Interval iv = detail::midpoint_interval_unchecked(spec);
    return iv.lo + iv.width() * (xi * xi * (3.0 - 2.0 * xi));
  }

  double invert(const BridgeSpec& spec, double d, double rel_tol = kInversionTolerance) const {
    const Interval iv = detail::midpoint_interval_unchecked(spec);
    const double tol = rel_tol * std::max(1.0, spec.width());
    if (!iv.contains(d, tol)) detail::throw_outside(d, iv);
    if (iv.degenerate(feasibility_tolerance(spec))) return 0.0;
    const double target = detail::clamp_unit((d - iv.lo) / iv.width());
    // smoothstep is strictly increasing on [0, 1]
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid * mid * (3.0 - 2.0 * mid) < target) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  }
};

inline double affine_bridge_eval(const BridgeSpec& spec, double xi) {
  require_feasible(spec);
  check_unit(xi);
  return AffineBridgeSelector{}(spec, xi);
}

inline double affine_bridge_invert(const BridgeSpec& spec, double d) {
  require_feasible(spec);
  return AffineBridgeSelector{}.invert(spec, d);
}

inline double affine_free_eval(double a, double r, double s, double c, double xi) {
  check_domain(r, s, c);
  check_unit(xi);
  return AffineFreeSelector{}(a, r, s, c, xi);
}

inline double affine_free_invert(double a, double r, double s, double c, double d) {
  check_domain(r, s, c);
  return AffineFreeSelector{}.invert(a, r, s, c, d);
}

inline double identity_initial_eval(double xi) noexcept { return IdentityInitialSelector{}(xi); }

}  // namespace lippath
