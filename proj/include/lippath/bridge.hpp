#pragma once

// Recursive midpoint construction of Lipschitz bridges on a dyadic grid.
//
// Level m fills the odd positions of the depth-m grid: each new value is the
// selector applied to the sub-bridge spanned by its two level-(m-1)
// neighbours and the node's noise component. Even positions are copied from
// the coarser level, never recomputed, so a depth-(n+1) build restricted to
// the depth-n grid equals the depth-n build bitwise.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "lippath/error.hpp"
#include "lippath/geometry.hpp"
#include "lippath/grid.hpp"
#include "lippath/selectors.hpp"

namespace lippath {

/// Point of the noise cube [0, 1]^(2^depth - 1), stored in level order.
class NoiseVector {
 public:
  NoiseVector() = default;

  NoiseVector(int depth, std::vector<double> values) : depth_(depth), values_(std::move(values)) {
    if (values_.size() != interior_node_count(depth)) {
      std::ostringstream os;
      os << "noise for depth " << depth << " needs " << interior_node_count(depth) << " components, got "
         << values_.size();
      throw Error(Errc::depth_mismatch, os.str());
    }
    for (double v : values_) check_unit(v);
  }

  static NoiseVector filled(int depth, double value) {
    return NoiseVector(depth, std::vector<double>(interior_node_count(depth), value));
  }

  int depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t flat) const noexcept { return values_[flat]; }
  double operator[](const NodeId& node) const noexcept { return values_[flat_index(node)]; }

  /// Appends the 2^depth components of the next level.
  NoiseVector extended(std::span<const double> next_level) const {
    std::vector<double> v(values_);
    v.insert(v.end(), next_level.begin(), next_level.end());
    return NoiseVector(depth_ + 1, std::move(v));
  }

  NoiseVector truncated(int depth) const {
    check_depth(depth);
    if (depth > depth_) throw Error(Errc::depth_mismatch, "cannot truncate noise to a larger depth");
    return NoiseVector(depth, std::vector<double>(values_.begin(), values_.begin() + interior_node_count(depth)));
  }

  friend bool operator==(const NoiseVector&, const NoiseVector&) = default;

 private:
  int depth_ = 0;
  std::vector<double> values_;
};

/// Path values on the 2^n + 1 points of a dyadic grid.
struct GridPath {
  DyadicGrid grid{0.0, 1.0, 0};
  double c = 1.0;
  std::vector<double> values;

  int depth() const noexcept { return grid.depth(); }
  double time(std::size_t j) const noexcept { return grid.time(j); }
  double front() const noexcept { return values.front(); }
  double back() const noexcept { return values.back(); }

  friend bool operator==(const GridPath&, const GridPath&) = default;
};

struct Enclosure {
  double lower = 0.0;
  double upper = 0.0;
};

inline void check_shape(const GridPath& path) {
  if (path.values.size() != path.grid.size()) {
    std::ostringstream os;
    os << "path at depth " << path.depth() << " needs " << path.grid.size() << " values, got "
       << path.values.size();
    throw Error(Errc::depth_mismatch, os.str());
  }
  if (!(path.c > 0.0)) throw Error(Errc::invalid_domain, "path Lipschitz constant must be positive");
}

/// Largest amount by which any pair of points breaks |x(v) - x(u)| <= c |v - u|.
/// `times` must be strictly increasing. Linear time: the all-pairs maximum of
/// (x_v - c t_v) - (x_u - c t_u) over u < v is a running-minimum scan, and
/// likewise for x + c t.
inline double max_lipschitz_violation(std::span<const double> times, std::span<const double> values, double c) {
  double worst = -std::numeric_limits<double>::infinity();
  double min_down = std::numeric_limits<double>::infinity();
  double max_up = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double down = values[i] - c * times[i];
    const double up = values[i] + c * times[i];
    if (i > 0) worst = std::max({worst, down - min_down, max_up - up});
    min_down = std::min(min_down, down);
    max_up = std::max(max_up, up);
  }
  return values.size() < 2 ? 0.0 : worst;
}

inline double max_lipschitz_violation(const GridPath& path) {
  const auto t = path.grid.times();
  return max_lipschitz_violation(t, path.values, path.c);
}

/// Fills `out` (2^depth + 1 values) from level-order `noise`. No validation;
/// `spec` must be feasible and the spans correctly sized.
template <BridgeSelector Sel>
void build_bridge_values(const BridgeSpec& spec, int depth, std::span<const double> noise, const Sel& sel,
                         std::span<double> out) noexcept {
  const std::size_t last = std::size_t{1} << depth;
  const double len = spec.s - spec.r;
  auto time = [&](std::size_t j) { return spec.r + std::ldexp(static_cast<double>(j), -depth) * len; };
  out[0] = spec.a;
  out[last] = spec.b;
  std::size_t flat = 0;
  for (int m = 1; m <= depth; ++m) {
    const std::size_t step = last >> m;
    for (std::size_t j = step; j < last; j += 2 * step, ++flat) {
      const BridgeSpec sub{time(j - step), time(j + step), out[j - step], out[j + step], spec.c};
      out[j] = sel(sub, noise[flat]);
    }
  }
}

template <BridgeSelector Sel = AffineBridgeSelector>
GridPath build_bridge(const BridgeSpec& spec, const NoiseVector& noise, const Sel& sel = {}) {
  require_feasible(spec);
  GridPath path{DyadicGrid(spec.r, spec.s, noise.depth()), spec.c, {}};
  path.values.resize(path.grid.size());
  build_bridge_values(spec, noise.depth(), noise.values(), sel, path.values);
  return path;
}

template <BridgeSelector Sel = AffineBridgeSelector>
GridPath build_bridge(const BridgeSpec& spec, const NoiseVector& noise, int depth, const Sel& sel = {}) {
  if (noise.depth() != depth) {
    std::ostringstream os;
    os << "noise depth " << noise.depth() << " does not match requested depth " << depth;
    throw Error(Errc::depth_mismatch, os.str());
  }
  return build_bridge(spec, noise, sel);
}

/// One level deeper: even positions copied, 2^n new odd positions from `extension`.
template <BridgeSelector Sel = AffineBridgeSelector>
GridPath refine(const BridgeSpec& spec, const GridPath& path, std::span<const double> extension,
                const Sel& sel = {}) {
  check_shape(path);
  const std::size_t cells = path.grid.cells();
  if (extension.size() != cells) {
    std::ostringstream os;
    os << "refining depth " << path.depth() << " needs " << cells << " noise values, got " << extension.size();
    throw Error(Errc::depth_mismatch, os.str());
  }
  for (double v : extension) check_unit(v);
  GridPath out{DyadicGrid(path.grid.r(), path.grid.s(), path.depth() + 1), spec.c, {}};
  out.values.resize(out.grid.size());
  for (std::size_t j = 0; j <= cells; ++j) out.values[2 * j] = path.values[j];
  for (std::size_t j = 0; j < cells; ++j) {
    const BridgeSpec sub{out.grid.time(2 * j), out.grid.time(2 * j + 2), out.values[2 * j], out.values[2 * j + 2],
                         spec.c};
    out.values[2 * j + 1] = sel(sub, extension[j]);
  }
  return out;
}

/// Noise that rebuilds `path`. Every midpoint value must lie in the interval
/// of its bracketing parents up to 1e-9 c (s - r); values within that slack
/// are snapped onto the interval before inversion.
template <InvertibleBridgeSelector Sel = AffineBridgeSelector>
NoiseVector invert_bridge(const GridPath& path, const BridgeSpec& spec, const Sel& sel = {}) {
  check_shape(path);
  require_feasible(spec);
  if (path.grid.r() != spec.r || path.grid.s() != spec.s || path.c != spec.c) {
    throw Error(Errc::invalid_domain, "path grid or Lipschitz constant does not match the bridge");
  }
  const double tol = kInversionTolerance * spec.width();
  auto violation = [&](std::size_t j, double value, const Interval& iv) {
    std::ostringstream os;
    os << "value " << exact(value) << " at t=" << exact(path.time(j)) << " is outside its admissible interval ["
       << exact(iv.lo) << ", " << exact(iv.hi) << "]";
    return Error(Errc::path_violates_lipschitz, os.str());
  };
  for (double v : path.values) {
    if (!std::isfinite(v)) throw Error(Errc::path_violates_lipschitz, "path contains a non-finite value");
  }
  const std::size_t last = path.grid.cells();
  if (std::abs(path.values[0] - spec.a) > tol) throw violation(0, path.values[0], {spec.a, spec.a});
  if (std::abs(path.values[last] - spec.b) > tol) throw violation(last, path.values[last], {spec.b, spec.b});

  const int depth = path.depth();
  std::vector<double> noise(interior_node_count(depth));
  std::size_t flat = 0;
  for (int m = 1; m <= depth; ++m) {
    const std::size_t step = last >> m;
    for (std::size_t j = step; j < last; j += 2 * step, ++flat) {
      const double left = j - step == 0 ? spec.a : path.values[j - step];
      const double right = j + step == last ? spec.b : path.values[j + step];
      const BridgeSpec sub{path.time(j - step), path.time(j + step), left, right, spec.c};
      const Interval iv = detail::midpoint_interval_unchecked(sub);
      const double d = path.values[j];
      if (!iv.contains(d, tol)) throw violation(j, d, iv);
      noise[flat] = sel.invert(sub, std::clamp(d, iv.lo, iv.hi));
    }
  }
  return NoiseVector(depth, std::move(noise));
}

/// Bounds that every c-Lipschitz extension of the grid values satisfies at t.
inline Enclosure enclosure_at(const GridPath& path, double t) {
  check_shape(path);
  const double r = path.grid.r();
  const double s = path.grid.s();
  if (!(t >= r && t <= s)) {
    std::ostringstream os;
    os << "t=" << t << " is outside [" << r << ", " << s << "]";
    throw Error(Errc::time_out_of_range, os.str());
  }
  const std::size_t cells = path.grid.cells();
  auto j = static_cast<std::size_t>(std::floor(std::ldexp((t - r) / (s - r), path.depth())));
  j = std::min(j, cells - 1);
  // the closed-form cell index can be off by one near node times
  while (j > 0 && path.time(j) > t) --j;
  while (j + 1 < cells && path.time(j + 1) <= t) ++j;
  const double t0 = path.time(j);
  const double t1 = path.time(j + 1);
  if (t == t0) return {path.values[j], path.values[j]};
  if (t == t1) return {path.values[j + 1], path.values[j + 1]};
  const double x0 = path.values[j];
  const double x1 = path.values[j + 1];
  Enclosure e{std::max(x0 - path.c * (t - t0), x1 - path.c * (t1 - t)),
              std::min(x0 + path.c * (t - t0), x1 + path.c * (t1 - t))};
  if (e.lower > e.upper) {
    const double mid = 0.5 * (e.lower + e.upper);
    e = {mid, mid};
  }
  return e;
}

inline Enclosure enclosure_at(const GridPath& path, const BridgeSpec& spec, double t) {
  if (path.grid.r() != spec.r || path.grid.s() != spec.s) {
    throw Error(Errc::invalid_domain, "path grid does not match the bridge");
  }
  return enclosure_at(path, t);
}

}  // namespace lippath
