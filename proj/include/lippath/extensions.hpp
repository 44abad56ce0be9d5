#pragma once

// Lifted constructions built from the bridge:
//   pinned-left   x(r) = a fixed, x(s) drawn from [a - c(s-r), a + c(s-r)]
//   pinned-right  the mirror image, x(r) drawn around b
//   half-line     [r, m] then unit segments [j, j+1] up to a horizon K, each
//                 pinned-left at the previous segment's terminal value
//   free          x(r) itself given by an initial selector of a real number
// plus the inverses that recover noise from a path.

#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include "lippath/bridge.hpp"
#include "lippath/error.hpp"
#include "lippath/geometry.hpp"
#include "lippath/selectors.hpp"

namespace lippath {

/// Interior noise plus one component for the free endpoint (s for
/// pinned-left, r for pinned-right).
struct EndpointNoise {
  double endpoint = 0.5;
  NoiseVector interior;

  friend bool operator==(const EndpointNoise&, const EndpointNoise&) = default;
};

using PinnedLeftNoise = EndpointNoise;
using PinnedRightNoise = EndpointNoise;

struct HalfLineNoise {
  std::vector<EndpointNoise> segments;

  const EndpointNoise& first_segment() const { return segments.at(0); }
  const EndpointNoise& unit_segment(std::size_t j) const { return segments.at(j + 1); }

  friend bool operator==(const HalfLineNoise&, const HalfLineNoise&) = default;
};

struct HalfLinePath {
  double r = 0.0;
  double c = 1.0;
  int horizon = 1;
  std::vector<GridPath> segments;

  int depth() const { return segments.empty() ? 0 : segments.front().depth(); }

  friend bool operator==(const HalfLinePath&, const HalfLinePath&) = default;
};

/// Real initial component plus the pinned-left noise of the segment.
struct FreeNoise {
  double initial = 0.0;
  EndpointNoise rest;

  friend bool operator==(const FreeNoise&, const FreeNoise&) = default;
};

struct FreeHalfLineNoise {
  double initial = 0.0;
  HalfLineNoise rest;

  friend bool operator==(const FreeHalfLineNoise&, const FreeHalfLineNoise&) = default;
};

/// Right end of the first half-line segment: the smallest integer > r.
inline double first_segment_end(double r) { return std::floor(r) + 1.0; }

inline std::size_t halfline_segment_count(double r, int horizon) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw Error(Errc::invalid_domain, "half-line start must satisfy r >= 0");
  if (!(static_cast<double>(horizon) > r)) {
    std::ostringstream os;
    os << "horizon " << horizon << " must be an integer greater than r=" << r;
    throw Error(Errc::invalid_horizon, os.str());
  }
  return 1 + static_cast<std::size_t>(horizon - static_cast<int>(first_segment_end(r)));
}

/// (start, end) of segment `k` of the half-line starting at r.
inline std::pair<double, double> halfline_segment_bounds(double r, std::size_t k) {
  const double m = first_segment_end(r);
  if (k == 0) return {r, m};
  return {m + static_cast<double>(k - 1), m + static_cast<double>(k)};
}

namespace detail {

inline void check_interior_depth(const EndpointNoise& noise, int depth) {
  check_unit(noise.endpoint);
  if (noise.interior.depth() != depth) {
    std::ostringstream os;
    os << "noise depth " << noise.interior.depth() << " does not match requested depth " << depth;
    throw Error(Errc::depth_mismatch, os.str());
  }
}

// Re-raise selector range errors on user paths as Lipschitz violations.
template <class F>
auto as_path_violation(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == Errc::value_outside_interval) throw Error(Errc::path_violates_lipschitz, e.what());
    throw;
  }
}

}  // namespace detail

template <BridgeSelector BSel = AffineBridgeSelector, FreeEndpointSelector FSel = AffineFreeSelector>
GridPath build_pinned_left(double a, double r, double s, double c, const PinnedLeftNoise& noise, int depth,
                           const BSel& bsel = {}, const FSel& fsel = {}) {
  check_domain(r, s, c);
  detail::check_interior_depth(noise, depth);
  const double b = fsel(a, r, s, c, noise.endpoint);
  return build_bridge(BridgeSpec{r, s, a, b, c}, noise.interior, bsel);
}

template <BridgeSelector BSel = AffineBridgeSelector, FreeEndpointSelector FSel = AffineFreeSelector>
GridPath build_pinned_right(double b, double r, double s, double c, const PinnedRightNoise& noise, int depth,
                            const BSel& bsel = {}, const FSel& fsel = {}) {
  check_domain(r, s, c);
  detail::check_interior_depth(noise, depth);
  // x(r) is drawn from the interval of half-width c (s - r) centred at b.
  const double a = fsel(b, r, s, c, noise.endpoint);
  return build_bridge(BridgeSpec{r, s, a, b, c}, noise.interior, bsel);
}

template <BridgeSelector BSel = AffineBridgeSelector, FreeEndpointSelector FSel = AffineFreeSelector>
HalfLinePath build_halfline(double a, double r, double c, const HalfLineNoise& noise, int horizon, int depth,
                            const BSel& bsel = {}, const FSel& fsel = {}) {
  const std::size_t count = halfline_segment_count(r, horizon);
  if (noise.segments.size() != count) {
    std::ostringstream os;
    os << "half-line to horizon " << horizon << " from r=" << r << " has " << count << " segments, noise has "
       << noise.segments.size();
    throw Error(Errc::invalid_horizon, os.str());
  }
  HalfLinePath path{r, c, horizon, {}};
  path.segments.reserve(count);
  double start_value = a;
  for (std::size_t k = 0; k < count; ++k) {
    const auto [t0, t1] = halfline_segment_bounds(r, k);
    path.segments.push_back(build_pinned_left(start_value, t0, t1, c, noise.segments[k], depth, bsel, fsel));
    start_value = path.segments.back().back();
  }
  return path;
}

template <InitialSelector ISel = IdentityInitialSelector, BridgeSelector BSel = AffineBridgeSelector,
          FreeEndpointSelector FSel = AffineFreeSelector>
GridPath build_free_segment(const FreeNoise& noise, double r, double s, double c, int depth, const ISel& isel = {},
                            const BSel& bsel = {}, const FSel& fsel = {}) {
  return build_pinned_left(isel(noise.initial), r, s, c, noise.rest, depth, bsel, fsel);
}

template <InitialSelector ISel = IdentityInitialSelector, BridgeSelector BSel = AffineBridgeSelector,
          FreeEndpointSelector FSel = AffineFreeSelector>
HalfLinePath build_free_halfline(const FreeHalfLineNoise& noise, double r, double c, int horizon, int depth,
                                 const ISel& isel = {}, const BSel& bsel = {}, const FSel& fsel = {}) {
  return build_halfline(isel(noise.initial), r, c, noise.rest, horizon, depth, bsel, fsel);
}

template <InvertibleBridgeSelector BSel = AffineBridgeSelector,
          InvertibleFreeEndpointSelector FSel = AffineFreeSelector>
PinnedLeftNoise invert_pinned_left(const GridPath& path, const BSel& bsel = {}, const FSel& fsel = {}) {
  check_shape(path);
  const double r = path.grid.r();
  const double s = path.grid.s();
  const double a = path.front();
  const double b = path.back();
  PinnedLeftNoise out;
  out.endpoint = detail::as_path_violation([&] { return fsel.invert(a, r, s, path.c, b); });
  out.interior = invert_bridge(path, BridgeSpec{r, s, a, b, path.c}, bsel);
  return out;
}

template <InvertibleBridgeSelector BSel = AffineBridgeSelector,
          InvertibleFreeEndpointSelector FSel = AffineFreeSelector>
PinnedRightNoise invert_pinned_right(const GridPath& path, const BSel& bsel = {}, const FSel& fsel = {}) {
  check_shape(path);
  const double r = path.grid.r();
  const double s = path.grid.s();
  const double a = path.front();
  const double b = path.back();
  PinnedRightNoise out;
  out.endpoint = detail::as_path_violation([&] { return fsel.invert(b, r, s, path.c, a); });
  out.interior = invert_bridge(path, BridgeSpec{r, s, a, b, path.c}, bsel);
  return out;
}

template <InvertibleBridgeSelector BSel = AffineBridgeSelector,
          InvertibleFreeEndpointSelector FSel = AffineFreeSelector>
HalfLineNoise invert_halfline(const HalfLinePath& path, const BSel& bsel = {}, const FSel& fsel = {}) {
  const std::size_t count = halfline_segment_count(path.r, path.horizon);
  if (path.segments.size() != count) {
    std::ostringstream os;
    os << "half-line to horizon " << path.horizon << " needs " << count << " segments, got " << path.segments.size();
    throw Error(Errc::invalid_horizon, os.str());
  }
  HalfLineNoise out;
  out.segments.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const GridPath& seg = path.segments[k];
    const auto [t0, t1] = halfline_segment_bounds(path.r, k);
    if (seg.grid.r() != t0 || seg.grid.s() != t1 || seg.c != path.c || seg.depth() != path.segments[0].depth()) {
      std::ostringstream os;
      os << "segment " << k << " must cover [" << t0 << ", " << t1 << "] with c=" << path.c
         << " and the common depth";
      throw Error(Errc::invalid_horizon, os.str());
    }
    if (k > 0) {
      const double prev = path.segments[k - 1].back();
      if (std::abs(prev - seg.front()) > kInversionTolerance * path.c) {
        std::ostringstream os;
        os << "segments " << k - 1 << " and " << k << " disagree at t=" << exact(t0) << ": " << exact(prev)
           << " vs " << exact(seg.front());
        throw Error(Errc::junction_mismatch, os.str());
      }
    }
    out.segments.push_back(invert_pinned_left(seg, bsel, fsel));
  }
  return out;
}

template <InvertibleInitialSelector ISel = IdentityInitialSelector,
          InvertibleBridgeSelector BSel = AffineBridgeSelector,
          InvertibleFreeEndpointSelector FSel = AffineFreeSelector>
FreeNoise invert_free_segment(const GridPath& path, const ISel& isel = {}, const BSel& bsel = {},
                              const FSel& fsel = {}) {
  check_shape(path);
  return FreeNoise{isel.invert(path.front()), invert_pinned_left(path, bsel, fsel)};
}

template <InvertibleInitialSelector ISel = IdentityInitialSelector,
          InvertibleBridgeSelector BSel = AffineBridgeSelector,
          InvertibleFreeEndpointSelector FSel = AffineFreeSelector>
FreeHalfLineNoise invert_free_halfline(const HalfLinePath& path, const ISel& isel = {}, const BSel& bsel = {},
                                       const FSel& fsel = {}) {
  if (path.segments.empty()) throw Error(Errc::invalid_horizon, "half-line path has no segments");
  return FreeHalfLineNoise{isel.invert(path.segments.front().front()), invert_halfline(path, bsel, fsel)};
}

/// Time-ordered (t, x) points of a half-line path, junctions listed once.
struct PathPoints {
  std::vector<double> times;
  std::vector<double> values;
};

inline PathPoints flatten(const HalfLinePath& path) {
  PathPoints pts;
  for (std::size_t k = 0; k < path.segments.size(); ++k) {
    const GridPath& seg = path.segments[k];
    for (std::size_t j = (k == 0 ? 0 : 1); j < seg.values.size(); ++j) {
      pts.times.push_back(seg.time(j));
      pts.values.push_back(seg.values[j]);
    }
  }
  return pts;
}

inline PathPoints flatten(const GridPath& path) { return {path.grid.times(), path.values}; }

}  // namespace lippath
