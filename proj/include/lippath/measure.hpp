#pragma once

// Pushforward-measure engine.
//
// The law of a constructed path under i.i.d. Uniform[0, 1] noise is the image
// measure nu(B) = mu(phi^{-1}(B)). For cylinder events B (finitely many
// constraints x(t_i) in [lo_i, hi_i]) this module estimates nu(B) by plain
// Monte Carlo, evaluates it by tensor midpoint quadrature over the noise cube
// for small depths, and integrates the free-initial-value cases over a finite
// window of initial values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "lippath/bridge.hpp"
#include "lippath/error.hpp"
#include "lippath/extensions.hpp"
#include "lippath/geometry.hpp"
#include "lippath/grid.hpp"
#include "lippath/rng.hpp"
#include "lippath/selectors.hpp"

namespace lippath {

// ---------------------------------------------------------------------------
// Domains and events

struct BridgeDomain {
  BridgeSpec spec;
};
struct PinnedLeftDomain {
  double a = 0.0, r = 0.0, s = 1.0, c = 1.0;
};
struct PinnedRightDomain {
  double b = 0.0, r = 0.0, s = 1.0, c = 1.0;
};
struct HalfLineDomain {
  double a = 0.0, r = 0.0, c = 1.0;
  int horizon = 1;
};
struct FreeSegmentDomain {
  double r = 0.0, s = 1.0, c = 1.0;
};
struct FreeHalfLineDomain {
  double r = 0.0, c = 1.0;
  int horizon = 1;
};

using Domain = std::variant<BridgeDomain, PinnedLeftDomain, PinnedRightDomain, HalfLineDomain, FreeSegmentDomain,
                            FreeHalfLineDomain>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline std::string_view domain_name(const Domain& d) {
  return std::visit(overloaded{[](const BridgeDomain&) { return std::string_view("bridge"); },
                               [](const PinnedLeftDomain&) { return std::string_view("pinned_left"); },
                               [](const PinnedRightDomain&) { return std::string_view("pinned_right"); },
                               [](const HalfLineDomain&) { return std::string_view("halfline"); },
                               [](const FreeSegmentDomain&) { return std::string_view("free_segment"); },
                               [](const FreeHalfLineDomain&) { return std::string_view("free_halfline"); }},
                    d);
}

inline bool is_probability_domain(const Domain& d) {
  return !std::holds_alternative<FreeSegmentDomain>(d) && !std::holds_alternative<FreeHalfLineDomain>(d);
}

/// x(t) in [lo, hi]; lo > hi denotes the empty constraint.
struct Constraint {
  double t = 0.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool empty() const noexcept { return lo > hi; }
  bool admits(double x) const noexcept { return x >= lo && x <= hi; }
};

struct CylinderEvent {
  std::vector<Constraint> constraints;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  int depth = 0;
};

struct OracleResult {
  double value = 0.0;
  std::uint64_t grid_points_per_dim = 0;
  double error_indicator = 0.0;
  double coarse_value = 0.0;
};

// ---------------------------------------------------------------------------
// Noise sampling

inline void fill_uniform(std::span<double> out, Rng& rng) noexcept {
  for (double& v : out) v = rng.uniform();
}

inline NoiseVector sample_noise(int depth, Rng& rng) {
  std::vector<double> v(interior_node_count(depth));
  fill_uniform(v, rng);
  return NoiseVector(depth, std::move(v));
}

/// Endpoint component first, then the interior in level order.
inline EndpointNoise sample_endpoint_noise(int depth, Rng& rng) {
  EndpointNoise out;
  out.endpoint = rng.uniform();
  out.interior = sample_noise(depth, rng);
  return out;
}

/// Segment k draws from child stream k.
inline HalfLineNoise sample_halfline_noise(double r, int horizon, int depth, Rng& rng) {
  const std::size_t count = halfline_segment_count(r, horizon);
  HalfLineNoise out;
  out.segments.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Rng sub = rng.split(k);
    out.segments.push_back(sample_endpoint_noise(depth, sub));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Event resolution and path simulation

namespace detail {

struct SegmentLayout {
  std::vector<std::pair<double, double>> bounds;  // (start, end) per segment
};

inline SegmentLayout layout_of(const Domain& d) {
  return std::visit(
      overloaded{[](const BridgeDomain& x) { return SegmentLayout{{{x.spec.r, x.spec.s}}}; },
                 [](const PinnedLeftDomain& x) { return SegmentLayout{{{x.r, x.s}}}; },
                 [](const PinnedRightDomain& x) { return SegmentLayout{{{x.r, x.s}}}; },
                 [](const FreeSegmentDomain& x) { return SegmentLayout{{{x.r, x.s}}}; },
                 [](const HalfLineDomain& x) {
                   SegmentLayout l;
                   const std::size_t n = halfline_segment_count(x.r, x.horizon);
                   for (std::size_t k = 0; k < n; ++k) l.bounds.push_back(halfline_segment_bounds(x.r, k));
                   return l;
                 },
                 [](const FreeHalfLineDomain& x) {
                   SegmentLayout l;
                   const std::size_t n = halfline_segment_count(x.r, x.horizon);
                   for (std::size_t k = 0; k < n; ++k) l.bounds.push_back(halfline_segment_bounds(x.r, k));
                   return l;
                 }},
      d);
}

inline void validate_domain(const Domain& d) {
  std::visit(overloaded{[](const BridgeDomain& x) { require_feasible(x.spec); },
                        [](const PinnedLeftDomain& x) { check_domain(x.r, x.s, x.c); },
                        [](const PinnedRightDomain& x) { check_domain(x.r, x.s, x.c); },
                        [](const FreeSegmentDomain& x) { check_domain(x.r, x.s, x.c); },
                        [](const HalfLineDomain& x) {
                          check_domain(x.r, x.r + 1.0, x.c);
                          halfline_segment_count(x.r, x.horizon);
                        },
                        [](const FreeHalfLineDomain& x) {
                          check_domain(x.r, x.r + 1.0, x.c);
                          halfline_segment_count(x.r, x.horizon);
                        }},
             d);
}

struct ResolvedConstraint {
  std::size_t offset;  // into the concatenated per-segment value buffer
  double lo;
  double hi;
};

[[noreturn]] inline void throw_off_grid(double t, const std::string& why) {
  std::ostringstream os;
  os << "constraint time t=" << exact(t) << " " << why;
  throw Error(Errc::event_time_not_on_grid, os.str());
}

/// Grid index of t on a depth-`depth` grid over [r, s], if t is a grid time.
inline bool grid_position(double t, double r, double s, int depth, std::size_t& j) {
  if (t < r || t > s) return false;
  const double x = std::ldexp((t - r) / (s - r), depth);
  const double k = std::nearbyint(x);
  if (k < 0 || k > std::ldexp(1.0, depth)) return false;
  const DyadicGrid grid(r, s, depth);
  j = static_cast<std::size_t>(k);
  return std::abs(grid.time(j) - t) <= 1e-12 * std::max({1.0, std::abs(t), s - r});
}

inline std::vector<ResolvedConstraint> resolve(const CylinderEvent& event, const SegmentLayout& layout, int depth) {
  const std::size_t stride = (std::size_t{1} << depth) + 1;
  std::vector<ResolvedConstraint> out;
  std::vector<double> seen;
  for (const Constraint& c : event.constraints) {
    if (!std::isfinite(c.t)) throw_off_grid(c.t, "is not finite");
    if (std::isnan(c.lo) || std::isnan(c.hi)) throw Error(Errc::invalid_domain, "constraint bounds must not be NaN");
    if (std::find(seen.begin(), seen.end(), c.t) != seen.end()) {
      std::ostringstream os;
      os << "constraint time t=" << c.t << " appears twice";
      throw Error(Errc::invalid_domain, os.str());
    }
    seen.push_back(c.t);
    bool found = false;
    for (std::size_t k = 0; k < layout.bounds.size() && !found; ++k) {
      std::size_t j = 0;
      if (grid_position(c.t, layout.bounds[k].first, layout.bounds[k].second, depth, j)) {
        out.push_back({k * stride + j, c.lo, c.hi});
        found = true;
      }
    }
    if (!found) {
      std::ostringstream os;
      os << "is not a point of the depth-" << depth << " grid on [" << layout.bounds.front().first << ", "
         << layout.bounds.back().second << "]";
      throw_off_grid(c.t, os.str());
    }
  }
  return out;
}

/// Per-thread scratch space for one path draw.
struct Workspace {
  std::vector<double> values;  // segments x (2^depth + 1)
  std::vector<double> noise;   // 2^depth - 1
};

inline void simulate_pinned_left(double a, double r, double s, double c, int depth, Rng& rng, std::span<double> out,
                                 std::vector<double>& noise) {
  const double b = AffineFreeSelector{}(a, r, s, c, rng.uniform());
  fill_uniform(noise, rng);
  build_bridge_values(BridgeSpec{r, s, a, b, c}, depth, noise, AffineBridgeSelector{}, out);
}

inline void simulate_halfline(double a, double c, int depth, const SegmentLayout& layout, Rng& rng,
                              Workspace& ws) {
  const std::size_t stride = (std::size_t{1} << depth) + 1;
  double start = a;
  for (std::size_t k = 0; k < layout.bounds.size(); ++k) {
    Rng sub = rng.split(k);
    std::span<double> seg(ws.values.data() + k * stride, stride);
    simulate_pinned_left(start, layout.bounds[k].first, layout.bounds[k].second, c, depth, sub, seg, ws.noise);
    start = seg[stride - 1];
  }
}

/// One draw. `initial` is the initial value for the free domains.
inline void simulate(const Domain& d, int depth, const SegmentLayout& layout, Rng& rng, double initial,
                     Workspace& ws) {
  const std::size_t stride = (std::size_t{1} << depth) + 1;
  std::span<double> first(ws.values.data(), stride);
  std::visit(overloaded{[&](const BridgeDomain& x) {
                          fill_uniform(ws.noise, rng);
                          build_bridge_values(x.spec, depth, ws.noise, AffineBridgeSelector{}, first);
                        },
                        [&](const PinnedLeftDomain& x) {
                          simulate_pinned_left(x.a, x.r, x.s, x.c, depth, rng, first, ws.noise);
                        },
                        [&](const PinnedRightDomain& x) {
                          const double a = AffineFreeSelector{}(x.b, x.r, x.s, x.c, rng.uniform());
                          fill_uniform(ws.noise, rng);
                          build_bridge_values(BridgeSpec{x.r, x.s, a, x.b, x.c}, depth, ws.noise,
                                              AffineBridgeSelector{}, first);
                        },
                        [&](const HalfLineDomain& x) { simulate_halfline(x.a, x.c, depth, layout, rng, ws); },
                        [&](const FreeSegmentDomain& x) {
                          simulate_pinned_left(initial, x.r, x.s, x.c, depth, rng, first, ws.noise);
                        },
                        [&](const FreeHalfLineDomain& x) {
                          simulate_halfline(initial, x.c, depth, layout, rng, ws);
                        }},
             d);
}

inline bool satisfies(const std::vector<double>& values, const std::vector<ResolvedConstraint>& cs) noexcept {
  for (const auto& c : cs) {
    const double x = values[c.offset];
    if (!(x >= c.lo && x <= c.hi)) return false;
  }
  return true;
}

inline unsigned resolve_threads(unsigned threads, std::uint64_t n) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(1, n / 1024 + 1)));
}

/// Counts draws in [0, n) whose path satisfies `cs`. Order-independent.
inline std::uint64_t count_hits(const Domain& d, int depth, const SegmentLayout& layout,
                                const std::vector<ResolvedConstraint>& cs, std::uint64_t n, std::uint64_t seed,
                                unsigned threads, double window_lo = 0.0, double window_len = 0.0) {
  const unsigned t = resolve_threads(threads, n);
  std::vector<std::uint64_t> partial(t, 0);
  auto work = [&](unsigned w) {
    Workspace ws;
    ws.values.assign(layout.bounds.size() * ((std::size_t{1} << depth) + 1), 0.0);
    ws.noise.assign(interior_node_count(depth), 0.0);
    const std::uint64_t begin = n * w / t;
    const std::uint64_t end = n * (w + 1) / t;
    std::uint64_t hits = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      Rng rng = Rng::stream(seed, i);
      double initial = 0.0;
      if (window_len > 0.0) initial = std::min(window_lo + window_len * rng.uniform(), window_lo + window_len);
      simulate(d, depth, layout, rng, initial, ws);
      hits += satisfies(ws.values, cs) ? 1 : 0;
    }
    partial[w] = hits;
  };
  if (t == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(t);
    for (unsigned w = 0; w < t; ++w) pool.emplace_back(work, w);
  }
  std::uint64_t total = 0;
  for (auto h : partial) total += h;
  return total;
}

inline void check_samples(std::uint64_t n) {
  if (n == 0) throw Error(Errc::invalid_domain, "number of samples must be positive");
}

}  // namespace detail

/// Draw paths of `domain` at `depth`, one stream per (seed, draw index).
inline GridPath sample_path(const Domain& domain, int depth, std::uint64_t seed, std::uint64_t index) {
  detail::validate_domain(domain);
  if (!is_probability_domain(domain) || std::holds_alternative<HalfLineDomain>(domain)) {
    throw Error(Errc::invalid_domain, "sample_path covers bridge, pinned_left and pinned_right");
  }
  check_depth(depth);
  const auto layout = detail::layout_of(domain);
  detail::Workspace ws;
  ws.values.assign(layout.bounds.size() * ((std::size_t{1} << depth) + 1), 0.0);
  ws.noise.assign(interior_node_count(depth), 0.0);
  Rng rng = Rng::stream(seed, index);
  detail::simulate(domain, depth, layout, rng, 0.0, ws);
  const auto [r, s] = layout.bounds.front();
  const double c = std::visit([](const auto& x) {
    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, BridgeDomain>) return x.spec.c;
    else return x.c;
  }, domain);
  return GridPath{DyadicGrid(r, s, depth), c, std::move(ws.values)};
}

inline HalfLinePath sample_halfline_path(const HalfLineDomain& domain, int depth, std::uint64_t seed,
                                         std::uint64_t index) {
  detail::validate_domain(domain);
  check_depth(depth);
  Rng rng = Rng::stream(seed, index);
  const HalfLineNoise noise = sample_halfline_noise(domain.r, domain.horizon, depth, rng);
  return build_halfline(domain.a, domain.r, domain.c, noise, domain.horizon, depth);
}

/// Fraction of sampled paths in the cylinder event, with binomial standard error.
inline Estimate mc_probability(const Domain& domain, const CylinderEvent& event, std::uint64_t n_samples, int depth,
                               std::uint64_t seed, unsigned threads = 0) {
  if (!is_probability_domain(domain)) {
    throw Error(Errc::non_probability_measure,
                std::string(domain_name(domain)) + " carries an infinite Lebesgue measure; use lebesgue_cylinder");
  }
  detail::check_samples(n_samples);
  check_depth(depth);
  detail::validate_domain(domain);
  const auto layout = detail::layout_of(domain);
  const auto cs = detail::resolve(event, layout, depth);
  Estimate est{0.0, 0.0, n_samples, seed, depth};
  if (std::any_of(event.constraints.begin(), event.constraints.end(), [](const Constraint& c) { return c.empty(); })) {
    return est;
  }
  const std::uint64_t hits = detail::count_hits(domain, depth, layout, cs, n_samples, seed, threads);
  const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
  est.mean = p;
  est.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
  return est;
}

/// Measure of a cylinder event under the free-initial-value (Lebesgue)
/// construction. The event must bound x(r) to a finite window J0; the result
/// is |J0| times the probability of the other constraints with x(r) ~ U(J0).
inline Estimate lebesgue_cylinder(const Domain& domain, const CylinderEvent& event, std::uint64_t n_samples, int depth,
                                  std::uint64_t seed, unsigned threads = 0) {
  double r = 0.0;
  if (const auto* f = std::get_if<FreeSegmentDomain>(&domain)) r = f->r;
  else if (const auto* h = std::get_if<FreeHalfLineDomain>(&domain)) r = h->r;
  else throw Error(Errc::invalid_domain, "lebesgue_cylinder needs a free_segment or free_halfline domain");
  detail::check_samples(n_samples);
  check_depth(depth);
  detail::validate_domain(domain);

  CylinderEvent rest;
  const Constraint* initial = nullptr;
  for (const Constraint& c : event.constraints) {
    if (c.t == r) initial = &c;
    else rest.constraints.push_back(c);
  }
  if (initial == nullptr) {
    throw Error(Errc::unbounded_initial_constraint, "event does not constrain x(r); its measure is infinite");
  }
  if (!initial->empty() && (!std::isfinite(initial->lo) || !std::isfinite(initial->hi))) {
    throw Error(Errc::unbounded_initial_constraint, "the constraint on x(r) must be a finite interval");
  }
  const auto layout = detail::layout_of(domain);
  const auto cs = detail::resolve(rest, layout, depth);
  Estimate est{0.0, 0.0, n_samples, seed, depth};
  const double len = initial->empty() ? 0.0 : initial->hi - initial->lo;
  if (len == 0.0 ||
      std::any_of(rest.constraints.begin(), rest.constraints.end(), [](const Constraint& c) { return c.empty(); })) {
    return est;
  }
  const std::uint64_t hits = detail::count_hits(domain, depth, layout, cs, n_samples, seed, threads, initial->lo, len);
  const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
  est.mean = len * p;
  est.std_error = len * std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
  return est;
}

// ---------------------------------------------------------------------------
// Quadrature oracle

namespace detail {

struct OracleNode {
  std::size_t j, left, right;
  bool constrained = false;
  double lo = 0.0, hi = 0.0;
};

template <BridgeSelector Sel>
class CubeIntegrator {
 public:
  CubeIntegrator(const BridgeSpec& spec, int depth, std::vector<OracleNode> nodes, const Sel& sel)
      : spec_(spec), depth_(depth), nodes_(std::move(nodes)), sel_(sel) {
    values_.assign((std::size_t{1} << depth) + 1, 0.0);
    values_.front() = spec.a;
    values_.back() = spec.b;
    last_constrained_ = -1;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].constrained) last_constrained_ = static_cast<long>(i);
    }
  }

  /// Number of midpoint-rule cells of [0,1]^dims (m per axis) inside the event.
  std::uint64_t count(std::uint64_t m) {
    m_ = m;
    return recurse(0);
  }

 private:
  double time(std::size_t j) const { return spec_.r + std::ldexp(static_cast<double>(j), -depth_) * (spec_.s - spec_.r); }

  std::uint64_t recurse(std::size_t i) {
    if (static_cast<long>(i) > last_constrained_) {
      std::uint64_t all = 1;
      for (std::size_t k = i; k < nodes_.size(); ++k) all *= m_;
      return all;
    }
    const OracleNode& node = nodes_[i];
    const BridgeSpec sub{time(node.left), time(node.right), values_[node.left], values_[node.right], spec_.c};
    std::uint64_t total = 0;
    for (std::uint64_t q = 0; q < m_; ++q) {
      const double xi = (static_cast<double>(q) + 0.5) / static_cast<double>(m_);
      const double v = sel_(sub, xi);
      if (node.constrained && !(v >= node.lo && v <= node.hi)) continue;
      values_[node.j] = v;
      total += recurse(i + 1);
    }
    return total;
  }

  BridgeSpec spec_;
  int depth_;
  std::vector<OracleNode> nodes_;
  Sel sel_;
  std::vector<double> values_;
  long last_constrained_ = -1;
  std::uint64_t m_ = 0;
};

}  // namespace detail

inline constexpr int kMaxOracleDepth = 4;
inline constexpr double kMaxOracleCells = 1e11;

/// nu(B) for a bridge as the integral of the event indicator over the noise
/// cube [0,1]^(2^depth - 1), by tensor midpoint rule with m points per axis.
/// error_indicator compares against the same rule with m/2 points.
template <BridgeSelector Sel = AffineBridgeSelector>
OracleResult oracle_probability(const BridgeSpec& spec, const CylinderEvent& event, int depth,
                                std::uint64_t points_per_dim, const Sel& sel = {}) {
  require_feasible(spec);
  if (depth < 0 || depth > kMaxOracleDepth) {
    std::ostringstream os;
    os << "oracle depth " << depth << " outside 0.." << kMaxOracleDepth;
    throw Error(Errc::dimension_too_large, os.str());
  }
  if (points_per_dim < 2 || points_per_dim % 2 != 0) {
    throw Error(Errc::invalid_domain, "points per dimension must be even and at least 2");
  }
  const std::size_t dims = interior_node_count(depth);
  if (std::pow(static_cast<double>(points_per_dim), static_cast<double>(dims)) > kMaxOracleCells) {
    std::ostringstream os;
    os << points_per_dim << "^" << dims << " quadrature cells exceed the limit " << kMaxOracleCells;
    throw Error(Errc::dimension_too_large, os.str());
  }
  const detail::SegmentLayout layout{{{spec.r, spec.s}}};
  const auto resolved = detail::resolve(event, layout, depth);
  OracleResult out{0.0, points_per_dim, 0.0, 0.0};
  if (std::any_of(event.constraints.begin(), event.constraints.end(), [](const Constraint& c) { return c.empty(); })) {
    return out;
  }

  const std::size_t last = std::size_t{1} << depth;
  std::vector<detail::OracleNode> nodes(dims);
  for (std::size_t i = 0; i < dims; ++i) {
    const NodeId id = node_at_flat_index(i);
    const std::size_t j = grid_index(id, depth);
    const std::size_t step = std::size_t{1} << (depth - id.level);
    nodes[i] = {j, j - step, j + step};
  }
  for (const auto& c : resolved) {
    if (c.offset == 0 || c.offset == last) {
      const double endpoint = c.offset == 0 ? spec.a : spec.b;
      if (!(endpoint >= c.lo && endpoint <= c.hi)) return out;
      continue;
    }
    auto& node = nodes[flat_index(node_at_grid_index(c.offset, depth))];
    node.constrained = true;
    node.lo = c.lo;
    node.hi = c.hi;
  }

  detail::CubeIntegrator<Sel> integrator(spec, depth, std::move(nodes), sel);
  auto value_at = [&](std::uint64_t m) {
    return static_cast<double>(integrator.count(m)) /
           std::pow(static_cast<double>(m), static_cast<double>(dims));
  };
  out.value = value_at(points_per_dim);
  out.coarse_value = value_at(points_per_dim / 2);
  out.error_indicator = std::abs(out.value - out.coarse_value);
  return out;
}

// ---------------------------------------------------------------------------
// Distributional checks

/// Kolmogorov-Smirnov distance between the sample and Uniform[lo, hi].
inline double ks_uniform_statistic(std::vector<double> samples, double lo = 0.0, double hi = 1.0) {
  if (samples.empty()) throw Error(Errc::invalid_domain, "KS statistic of an empty sample");
  if (!(hi > lo)) throw Error(Errc::degenerate_interval, "KS reference interval is degenerate");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = std::clamp((samples[i] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// KS distance of the sampled level-1 midpoint x((r+s)/2) to the uniform law
/// on the midpoint interval. Deeper nodes have mixture marginals; use
/// recovered_noise_ks for them.
inline double marginal_ks_check(const BridgeSpec& spec, const NodeId& node, std::uint64_t n_samples,
                                std::uint64_t seed) {
  check_node(node);
  if (node.level != 1) {
    throw Error(Errc::invalid_domain, "only the level-1 node has an unconditional uniform marginal");
  }
  detail::check_samples(n_samples);
  const Interval iv = midpoint_interval(spec);
  if (iv.degenerate(feasibility_tolerance(spec))) {
    throw Error(Errc::degenerate_interval, "midpoint interval is a single point");
  }
  std::vector<double> xs;
  xs.reserve(n_samples);
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    Rng rng = Rng::stream(seed, i);
    const GridPath path = build_bridge(spec, sample_noise(1, rng));
    xs.push_back(path.values[1]);
  }
  return ks_uniform_statistic(std::move(xs), iv.lo, iv.hi);
}

struct NodeKs {
  NodeId node;
  double statistic = 0.0;
  std::uint64_t n_used = 0;
};

namespace detail {

// Recovered noise per node (level order) from n inverted sample paths,
// skipping draws where the node's interval given its parents is degenerate.
inline std::vector<std::vector<double>> recovered_noise(const BridgeSpec& spec, int depth, std::uint64_t n_samples,
                                                        std::uint64_t seed) {
  require_feasible(spec);
  check_samples(n_samples);
  const std::size_t dims = interior_node_count(depth);
  std::vector<std::vector<double>> recovered(dims);
  const std::size_t last = std::size_t{1} << depth;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    Rng rng = Rng::stream(seed, i);
    const GridPath path = build_bridge(spec, sample_noise(depth, rng));
    const NoiseVector noise = invert_bridge(path, spec);
    for (std::size_t f = 0; f < dims; ++f) {
      const NodeId id = node_at_flat_index(f);
      const std::size_t j = grid_index(id, depth);
      const std::size_t step = std::size_t{1} << (depth - id.level);
      const BridgeSpec sub{path.time(j - step), path.time(j + step), j - step == 0 ? spec.a : path.values[j - step],
                           j + step == last ? spec.b : path.values[j + step], spec.c};
      if (midpoint_interval_unchecked(sub).degenerate(feasibility_tolerance(sub))) continue;
      recovered[f].push_back(noise[f]);
    }
  }
  return recovered;
}

}  // namespace detail

/// Samples bridge paths, inverts them and KS-tests the recovered noise at
/// each node against Uniform[0, 1]. Given its parents every node value is
/// uniform on its interval, so the recovered components are i.i.d. uniform.
inline std::vector<NodeKs> recovered_noise_ks(const BridgeSpec& spec, int depth, std::uint64_t n_samples,
                                              std::uint64_t seed) {
  auto recovered = detail::recovered_noise(spec, depth, n_samples, seed);
  std::vector<NodeKs> out;
  for (std::size_t f = 0; f < recovered.size(); ++f) {
    if (recovered[f].empty()) continue;
    const std::uint64_t used = recovered[f].size();
    out.push_back({node_at_flat_index(f), ks_uniform_statistic(std::move(recovered[f])), used});
  }
  return out;
}

/// Same, with the components of all nondegenerate nodes pooled into one sample.
inline NodeKs pooled_recovered_noise_ks(const BridgeSpec& spec, int depth, std::uint64_t n_samples,
                                        std::uint64_t seed) {
  auto recovered = detail::recovered_noise(spec, depth, n_samples, seed);
  std::vector<double> pooled;
  for (auto& v : recovered) pooled.insert(pooled.end(), v.begin(), v.end());
  const std::uint64_t used = pooled.size();
  if (pooled.empty()) throw Error(Errc::degenerate_interval, "every node interval was degenerate");
  return {NodeId{1, 1}, ks_uniform_statistic(std::move(pooled)), used};
}

}  // namespace lippath
