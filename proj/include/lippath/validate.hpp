#pragma once

// Self-check suite behind `lippath validate`. Each check is named after the
// acceptance criterion it exercises (AC1 ... AC10) and runs at the criterion's
// sample sizes and tolerances unless `scale` shrinks the sample counts.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lippath/bridge.hpp"
#include "lippath/extensions.hpp"
#include "lippath/io.hpp"
#include "lippath/measure.hpp"
#include "lippath/rng.hpp"

namespace lippath::validate {

struct Options {
  std::uint64_t seed = 20261016;
  double scale = 1.0;       // multiplies sample counts; 1.0 = criterion sizes
  std::string fault;        // test hook: id of a check whose data gets corrupted
  unsigned threads = 0;
};

struct CheckResult {
  std::string id;
  std::string name;
  bool passed = false;
  double metric = 0.0;
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct Report {
  std::vector<CheckResult> checks;
  bool all_passed() const {
    for (const auto& c : checks) if (!c.passed) return false;
    return true;
  }
};

namespace detail {

inline std::uint64_t scaled(std::uint64_t n, const Options& opt) {
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(static_cast<double>(n) * opt.scale)));
}

/// Random feasible spec; `max_slope` < 1 keeps the level-1 interval wide.
inline BridgeSpec random_spec(Rng& rng, double max_slope = 1.0) {
  const double len = 0.01 + 3.99 * rng.uniform();
  const double r = 5.0 * rng.uniform();
  const double c = 0.1 + 4.9 * rng.uniform();
  const double a = -5.0 + 10.0 * rng.uniform();
  const double b = a + max_slope * c * len * (2.0 * rng.uniform() - 1.0);
  return {r, r + len, a, b, c};
}

/// Spec on a coarse dyadic lattice so every value below is exact in binary.
inline BridgeSpec dyadic_forced_spec(Rng& rng) {
  auto pick = [&](int n) { return static_cast<double>(rng() % static_cast<std::uint64_t>(n)); };
  const double r = pick(256) / 64.0;
  const double len = (1.0 + pick(256)) / 64.0;
  const double c = (1.0 + pick(64)) / 16.0;
  const double a = (pick(512) - 256.0) / 64.0;
  const double b = (rng() & 1u) ? a + c * len : a - c * len;
  return {r, r + len, a, b, c};
}

inline bool faulty(const Options& opt, const char* id) { return opt.fault == id; }

}  // namespace detail

inline CheckResult check_lipschitz(const Options& opt) {
  CheckResult res{"AC1", "lipschitz", true, 0.0, 0.0, {}, 0.0};
  Rng gen(opt.seed ^ 1);
  const std::uint64_t n = detail::scaled(10000, opt);
  double worst_ratio = -1e300;
  for (std::uint64_t i = 0; i < n; ++i) {
    const BridgeSpec spec = detail::random_spec(gen);
    GridPath path = build_bridge(spec, sample_noise(10, gen));
    if (i == 0 && detail::faulty(opt, "AC1")) path.values[3] += spec.width();
    const double tol = 1e-9 * spec.width();
    const double v = max_lipschitz_violation(path);
    worst_ratio = std::max(worst_ratio, v / tol);
    if (v > tol) res.passed = false;
  }
  res.metric = worst_ratio;
  res.threshold = 1.0;
  res.detail = std::to_string(n) + " specs at depth 10; metric = worst violation / (1e-9 c (s - r))";
  return res;
}

inline CheckResult check_refinement(const Options& opt) {
  CheckResult res{"AC2", "refinement", true, 0.0, 0.0, {}, 0.0};
  Rng gen(opt.seed ^ 2);
  const std::uint64_t n = detail::scaled(1000, opt);
  std::uint64_t mismatches = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const int depth = 1 + static_cast<int>(i % 8);
    const BridgeSpec spec = detail::random_spec(gen);
    const NoiseVector fine_noise = sample_noise(depth + 1, gen);
    const GridPath coarse = build_bridge(spec, fine_noise.truncated(depth));
    GridPath fine = build_bridge(spec, fine_noise);
    if (i == 0 && detail::faulty(opt, "AC2")) fine.values[2] = std::nextafter(fine.values[2], 1e300);
    for (std::size_t j = 0; j < coarse.values.size(); ++j) {
      if (fine.values[2 * j] != coarse.values[j]) {
        ++mismatches;
        break;
      }
    }
  }
  res.passed = mismatches == 0;
  res.metric = static_cast<double>(mismatches);
  res.detail = std::to_string(n) + " cases, depth n <= 8 vs n + 1; metric = cases with any bitwise mismatch";
  return res;
}

inline CheckResult check_round_trips(const Options& opt) {
  CheckResult res{"AC3", "surjectivity-round-trip", true, 0.0, 1e-12, {}, 0.0};
  Rng gen(opt.seed ^ 3);
  const std::uint64_t n = detail::scaled(1000, opt);
  double worst = 0.0;
  auto track = [&](const std::vector<double>& x, const std::vector<double>& y) {
    for (std::size_t j = 0; j < x.size(); ++j) worst = std::max(worst, std::abs(x[j] - y[j]));
  };
  for (std::uint64_t i = 0; i < n; ++i) {
    const BridgeSpec spec = detail::random_spec(gen);
    const GridPath path = build_bridge(spec, sample_noise(6, gen));
    GridPath rebuilt = build_bridge(spec, invert_bridge(path, spec));
    if (i == 0 && detail::faulty(opt, "AC3")) rebuilt.values[5] += 1e-6;
    track(path.values, rebuilt.values);

    const GridPath pl = build_pinned_left(spec.a, spec.r, spec.s, spec.c, sample_endpoint_noise(6, gen), 6);
    const GridPath pl2 = build_pinned_left(spec.a, spec.r, spec.s, spec.c, invert_pinned_left(pl), 6);
    track(pl.values, pl2.values);

    const double r = 2.9 * gen.uniform();
    const HalfLinePath hl = build_halfline(spec.a, r, spec.c, sample_halfline_noise(r, 3, 4, gen), 3, 4);
    const HalfLinePath hl2 = build_halfline(spec.a, r, spec.c, invert_halfline(hl), 3, 4);
    for (std::size_t k = 0; k < hl.segments.size(); ++k) track(hl.segments[k].values, hl2.segments[k].values);
  }
  res.passed = worst <= 1e-12;
  res.metric = worst;
  res.detail = std::to_string(n) + " paths each: bridge depth 6, pinned-left depth 6, half-line horizon 3 depth 4";
  return res;
}

inline CheckResult check_forced_line(const Options& opt) {
  CheckResult res{"AC4", "forced-line", true, 0.0, 0.0, {}, 0.0};
  Rng gen(opt.seed ^ 4);
  const std::uint64_t n = detail::scaled(100, opt);
  std::uint64_t bad = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const BridgeSpec spec = detail::dyadic_forced_spec(gen);
    GridPath path = build_bridge(spec, sample_noise(8, gen));
    if (i == 0 && detail::faulty(opt, "AC4")) path.values[1] += 1e-3;
    for (std::size_t j = 0; j < path.values.size(); ++j) {
      const double line = spec.a + (spec.b - spec.a) * std::ldexp(static_cast<double>(j), -8);
      if (path.values[j] != line) {
        ++bad;
        break;
      }
    }
  }
  res.passed = bad == 0;
  res.metric = static_cast<double>(bad);
  res.detail = std::to_string(n) + " dyadic specs with |b - a| = c (s - r), depth 8; metric = paths off the line";
  return res;
}

inline CheckResult check_uniform_marginal(const Options& opt) {
  CheckResult res{"AC5", "uniform-marginal", true, 0.0, 0.0, {}, 0.0};
  Rng gen(opt.seed ^ 5);
  const std::uint64_t n = detail::scaled(100000, opt);
  double worst_ratio = 0.0;
  for (int k = 0; k < 10; ++k) {
    const BridgeSpec spec = detail::random_spec(gen, 0.9);
    const double limit = 1.63 / std::sqrt(static_cast<double>(n));
    double d = marginal_ks_check(spec, NodeId{1, 1}, n, opt.seed + 100 + k);
    if (k == 0 && detail::faulty(opt, "AC5")) d += limit;
    worst_ratio = std::max(worst_ratio, d / limit);

    // Recovered noise, pooled over nondegenerate nodes of a depth-3 build.
    const NodeKs pooled = pooled_recovered_noise_ks(spec, 3, n, opt.seed + 200 + k);
    worst_ratio = std::max(worst_ratio, pooled.statistic / (1.63 / std::sqrt(static_cast<double>(pooled.n_used))));
  }
  res.passed = worst_ratio < 1.0;
  res.metric = worst_ratio;
  res.threshold = 1.0;
  res.detail = "10 specs, " + std::to_string(n) + " samples; metric = worst KS distance / (1.63 / sqrt(n))";
  return res;
}

inline const CylinderEvent& positive_event() {
  static const CylinderEvent ev{{{0.25, 0.0, std::numeric_limits<double>::infinity()},
                                 {0.5, 0.0, std::numeric_limits<double>::infinity()},
                                 {0.75, 0.0, std::numeric_limits<double>::infinity()}}};
  return ev;
}

inline CheckResult check_pushforward(const Options& opt) {
  CheckResult res{"AC6", "pushforward-identity", true, 0.0, 0.0, {}, 0.0};
  const BridgeSpec spec{0.0, 1.0, 0.0, 0.0, 1.0};
  const OracleResult oracle = oracle_probability(spec, positive_event(), 2, 256);
  Estimate mc = mc_probability(BridgeDomain{spec}, positive_event(), detail::scaled(1000000, opt), 2, opt.seed, opt.threads);
  if (detail::faulty(opt, "AC6")) mc.mean += 0.05;
  const double gap = std::abs(mc.mean - oracle.value);
  res.threshold = 3.0 * mc.std_error + oracle.error_indicator;
  res.metric = gap;
  res.passed = gap <= res.threshold && oracle.error_indicator <= 1e-3;
  std::ostringstream os;
  os.precision(10);
  os << "MC " << mc.mean << " +- " << mc.std_error << " vs oracle " << oracle.value << " (m=256, indicator "
     << oracle.error_indicator << ")";
  res.detail = os.str();
  return res;
}

inline CheckResult check_analytic_midpoint(const Options& opt) {
  CheckResult res{"AC7", "analytic-midpoint", true, 0.0, 0.0, {}, 0.0};
  const CylinderEvent ev{{{0.5, 0.0, 0.5}}};
  Estimate mc = mc_probability(BridgeDomain{{0.0, 1.0, 0.0, 0.0, 1.0}}, ev, detail::scaled(1000000, opt), 1,
                               opt.seed + 7, opt.threads);
  if (detail::faulty(opt, "AC7")) mc.mean += 0.05;
  res.metric = std::abs(mc.mean - 0.5);
  res.threshold = 3.0 * mc.std_error;
  res.passed = res.metric <= res.threshold;
  std::ostringstream os;
  os.precision(10);
  os << "P(x(0.5) in [0, 0.5]) MC " << mc.mean << " +- " << mc.std_error << " vs 0.5";
  res.detail = os.str();
  return res;
}

inline CheckResult check_halfline_gluing(const Options& opt) {
  CheckResult res{"AC8", "halfline-gluing", true, 0.0, 0.0, {}, 0.0};
  Rng gen(opt.seed ^ 8);
  const std::uint64_t n = detail::scaled(1000, opt);
  std::uint64_t junction_bad = 0;
  double worst_ratio = -1e300;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double r = 2.9 * gen.uniform();
    const double c = 0.1 + 4.9 * gen.uniform();
    const double a = -5.0 + 10.0 * gen.uniform();
    HalfLinePath path = build_halfline(a, r, c, sample_halfline_noise(r, 3, 6, gen), 3, 6);
    if (i == 0 && detail::faulty(opt, "AC8")) path.segments.back().values.front() += 0.5 * c;
    for (std::size_t k = 1; k < path.segments.size(); ++k) {
      if (path.segments[k - 1].back() != path.segments[k].front()) ++junction_bad;
    }
    const PathPoints pts = flatten(path);
    const double tol = 1e-9 * c * (3.0 - r);
    worst_ratio = std::max(worst_ratio, max_lipschitz_violation(pts.times, pts.values, c) / tol);
  }
  res.passed = junction_bad == 0 && worst_ratio <= 1.0;
  res.metric = worst_ratio;
  res.threshold = 1.0;
  res.detail = std::to_string(n) + " draws, horizon 3, depth 6; junction mismatches " + std::to_string(junction_bad) +
               "; metric = worst violation / (1e-9 c (K - r))";
  return res;
}

inline CheckResult check_lebesgue_window(const Options& opt) {
  CheckResult res{"AC9", "lebesgue-window", true, 0.0, 0.0, {}, 0.0};
  double worst = 0.0;
  for (double len : {0.5, 1.0, 2.0}) {
    const CylinderEvent ev{{{0.0, 0.0, len}}};
    double seg = lebesgue_cylinder(FreeSegmentDomain{0.0, 1.0, 1.0}, ev, detail::scaled(10000, opt), 4, opt.seed).mean;
    const double half = lebesgue_cylinder(FreeHalfLineDomain{0.0, 1.0, 3}, ev, detail::scaled(1000, opt), 3, opt.seed).mean;
    if (detail::faulty(opt, "AC9")) seg *= 1.01;
    worst = std::max({worst, std::abs(seg - len), std::abs(half - len)});
  }
  res.passed = worst == 0.0;
  res.metric = worst;
  res.detail = "x(r) in [0, L] only, L in {0.5, 1, 2}, free segment and free half-line; metric = max |measure - L|";
  return res;
}

inline CheckResult check_determinism(const Options& opt) {
  CheckResult res{"AC10", "determinism", true, 0.0, 0.0, {}, 0.0};
  const Domain bridge = BridgeDomain{{0.0, 1.0, 0.0, 0.25, 1.0}};
  const Domain half = HalfLineDomain{0.0, 0.5, 1.0, 3};
  std::uint64_t differing = 0;
  for (const Domain* d : {&bridge, &half}) {
    for (auto fmt : {io::PathFormat::csv, io::PathFormat::jsonl}) {
      std::ostringstream first;
      std::ostringstream second;
      io::write_samples(first, *d, 4, 20, opt.seed, fmt);
      io::write_samples(second, *d, 4, 20, opt.seed, fmt);
      if (detail::faulty(opt, "AC10")) second << ' ';
      if (first.str() != second.str()) ++differing;
    }
  }
  res.passed = differing == 0;
  res.metric = static_cast<double>(differing);
  res.detail = "two sample runs per (domain, format) with the same seed; metric = outputs that differ";
  return res;
}

inline Report run_all(const Options& opt) {
  using Check = CheckResult (*)(const Options&);
  const Check checks[] = {check_lipschitz,       check_refinement,         check_round_trips, check_forced_line,
                          check_uniform_marginal, check_pushforward,       check_analytic_midpoint,
                          check_halfline_gluing, check_lebesgue_window,    check_determinism};
  Report report;
  for (Check check : checks) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r = check(opt);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.checks.push_back(std::move(r));
  }
  return report;
}

inline io::json to_json(const Report& report) {
  io::json checks = io::json::array();
  std::size_t passed = 0;
  for (const auto& c : report.checks) {
    passed += c.passed ? 1 : 0;
    checks.push_back({{"id", c.id},
                      {"name", c.name},
                      {"passed", c.passed},
                      {"metric", c.metric},
                      {"threshold", c.threshold},
                      {"detail", c.detail}});
  }
  return {{"checks", checks},
          {"summary", {{"passed", passed}, {"failed", report.checks.size() - passed}, {"all_passed", report.all_passed()}}}};
}

}  // namespace lippath::validate
