#include "lippath/measure.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace lippath;
using lptest::error_code_of;

namespace {

const BridgeSpec kSymmetric{0, 1, 0, 0, 1};

CylinderEvent event(std::initializer_list<Constraint> cs) { return CylinderEvent{cs}; }

CylinderEvent positive_at_quarters() {
  return event({{0.25, 0.0, INFINITY}, {0.5, 0.0, INFINITY}, {0.75, 0.0, INFINITY}});
}

// P(x(t) >= 0 at t = 1/4, 1/2, 3/4) for the symmetric unit bridge, by hand:
// x(1/2) = d ~ U[-1/2, 1/2]; given d >= 0 each quarter value is uniform on
// [d - 1/4, 1/4], nonnegative with probability 1/4 / (1/2 - d) for d <= 1/4
// and 1 beyond. Integrating the square over d in [0, 1/2] gives 3/8.
constexpr double kPositiveAtQuartersExact = 0.375;

}  // namespace

TEST(SampleNoise, DeterministicForAFixedSeed) {
  Rng a(7), b(7), c(8);
  const NoiseVector x = sample_noise(4, a);
  EXPECT_EQ(x, sample_noise(4, b));
  EXPECT_NE(x, sample_noise(4, c));
  EXPECT_EQ(x.size(), 15u);
}

TEST(SampleNoise, UniformMomentsAndIndependence) {
  const int n = 100000;
  double s0 = 0, s1 = 0, s00 = 0, s11 = 0, s01 = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::stream(99, i);
    const NoiseVector w = sample_noise(2, rng);
    for (double v : w.values()) ASSERT_TRUE(v >= 0.0 && v < 1.0);
    s0 += w[0];
    s1 += w[2];
    s00 += w[0] * w[0];
    s11 += w[2] * w[2];
    s01 += w[0] * w[2];
  }
  const double m0 = s0 / n, m1 = s1 / n;
  EXPECT_NEAR(m0, 0.5, 3 * std::sqrt(1.0 / 12) / std::sqrt(n));
  EXPECT_NEAR(m1, 0.5, 3 * std::sqrt(1.0 / 12) / std::sqrt(n));
  EXPECT_NEAR(s00 / n - m0 * m0, 1.0 / 12, 0.002);
  const double rho = (s01 / n - m0 * m1) / std::sqrt((s00 / n - m0 * m0) * (s11 / n - m1 * m1));
  EXPECT_LT(std::abs(rho), 0.01);
}

TEST(SampleNoise, DeeperNoiseExtendsShallowerNoise) {
  Rng a(3), b(3);
  const NoiseVector shallow = sample_noise(3, a);
  EXPECT_EQ(sample_noise(5, b).truncated(3), shallow);
}

TEST(SamplePath, MatchesBuildFromTheSameStream) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng = Rng::stream(5, i);
    EXPECT_EQ(sample_path(BridgeDomain{kSymmetric}, 4, 5, i), build_bridge(kSymmetric, sample_noise(4, rng)));
    Rng rng2 = Rng::stream(5, i);
    const EndpointNoise w = sample_endpoint_noise(4, rng2);
    EXPECT_EQ(sample_path(PinnedLeftDomain{0.5, 0, 2, 1.5}, 4, 5, i), build_pinned_left(0.5, 0, 2, 1.5, w, 4));
  }
}

TEST(McProbability, Examples) {
  const Estimate half = mc_probability(BridgeDomain{kSymmetric}, event({{0.5, 0.0, 0.5}}), 100000, 1, 1);
  EXPECT_NEAR(half.mean, 0.5, 4 * half.std_error);
  EXPECT_GT(half.std_error, 0.0);
  EXPECT_EQ(half.n_samples, 100000u);

  const Estimate full = mc_probability(BridgeDomain{kSymmetric}, event({{0.5, -0.5, 0.5}}), 10000, 3, 1);
  EXPECT_EQ(full.mean, 1.0);
  EXPECT_EQ(full.std_error, 0.0);

  const Estimate line = mc_probability(BridgeDomain{{0, 1, 0, 1, 1}}, event({{0.25, 0.2, 0.3}}), 10000, 2, 1);
  EXPECT_EQ(line.mean, 1.0);
}

TEST(McProbability, Errors) {
  const Domain d = BridgeDomain{kSymmetric};
  try {
    mc_probability(d, event({{0.3, 0, 1}}), 10, 2, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::event_time_not_on_grid);
    EXPECT_NE(std::string(e.what()).find("t=0.3 "), std::string::npos);
  }
  EXPECT_EQ(error_code_of([&] { mc_probability(d, event({{0.125, 0, 1}}), 10, 2, 1); }),
            Errc::event_time_not_on_grid);
  EXPECT_EQ(error_code_of([&] { mc_probability(d, event({{1.5, 0, 1}}), 10, 2, 1); }), Errc::event_time_not_on_grid);
  EXPECT_EQ(error_code_of([&] { mc_probability(FreeSegmentDomain{0, 1, 1}, event({{0, 0, 1}}), 10, 2, 1); }),
            Errc::non_probability_measure);
  EXPECT_EQ(error_code_of([&] { mc_probability(BridgeDomain{{0, 1, 0, 3, 1}}, event({}), 10, 2, 1); }),
            Errc::infeasible_spec);
  EXPECT_EQ(error_code_of([&] { mc_probability(d, event({}), 0, 2, 1); }), Errc::invalid_domain);
}

TEST(McProbability, EmptyConstraintGivesZero) {
  EXPECT_EQ(mc_probability(BridgeDomain{kSymmetric}, event({{0.5, 0.2, 0.1}}), 1000, 2, 1).mean, 0.0);
}

TEST(McProbability, AnalyticMidpointProbability) {
  const Estimate e = mc_probability(BridgeDomain{kSymmetric}, event({{0.5, 0.0, 0.5}}), 1000000, 4, 2026);
  EXPECT_NEAR(e.mean, 0.5, 3 * e.std_error);
}

TEST(McProbability, ThreadCountDoesNotChangeTheResult) {
  const Domain d = HalfLineDomain{0.0, 0.5, 1.0, 3};
  const auto ev = event({{1.0, -0.2, 0.4}, {2.5, -1.0, 0.5}});
  const Estimate one = mc_probability(d, ev, 20000, 3, 17, 1);
  EXPECT_EQ(one.mean, mc_probability(d, ev, 20000, 3, 17, 7).mean);
  EXPECT_EQ(one.mean, mc_probability(d, ev, 20000, 3, 17, 0).mean);
}

TEST(McProbability, CountsAgreeWithExplicitPathDraws) {
  // the estimator's inner loop against paths drawn through the public sampler
  const HalfLineDomain d{0.25, 0.5, 1.5, 3};
  const auto ev = event({{1.0, -0.5, 0.75}, {2.0, -1.0, 1.0}, {2.75, 0.0, INFINITY}});
  const int n = 4000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const PathPoints pts = flatten(sample_halfline_path(d, 2, 77, i));
    bool ok = true;
    for (const auto& c : ev.constraints) {
      for (std::size_t j = 0; j < pts.times.size(); ++j) {
        if (pts.times[j] == c.t) ok = ok && c.admits(pts.values[j]);
      }
    }
    hits += ok;
  }
  EXPECT_EQ(mc_probability(d, ev, n, 2, 77).mean, static_cast<double>(hits) / n);

  const PinnedRightDomain pr{0.3, 1, 3, 0.7};
  const auto ev2 = event({{1.5, 0.0, 0.6}, {2.0, -INFINITY, 0.5}});
  hits = 0;
  for (int i = 0; i < n; ++i) {
    const GridPath p = sample_path(pr, 3, 78, i);
    hits += ev2.constraints[0].admits(p.values[2]) && ev2.constraints[1].admits(p.values[4]);
  }
  EXPECT_EQ(mc_probability(pr, ev2, n, 3, 78).mean, static_cast<double>(hits) / n);
}

TEST(McProbability, PropertyMonotoneUnderCommonRandomNumbers) {
  lptest::Gen g(80);
  for (int i = 0; i < 40; ++i) {
    const double lo = lptest::uniform(g, -0.5, 0.2);
    const double hi = lo + lptest::uniform(g, 0.0, 0.5);
    const double grow = lptest::uniform(g, 0.0, 0.2);
    const auto small = event({{0.5, lo, hi}, {0.25, -0.1, INFINITY}});
    const auto large = event({{0.5, lo - grow, hi + grow}, {0.25, -0.1 - grow, INFINITY}});
    const std::uint64_t seed = g();
    EXPECT_LE(mc_probability(BridgeDomain{kSymmetric}, small, 5000, 3, seed).mean,
              mc_probability(BridgeDomain{kSymmetric}, large, 5000, 3, seed).mean);
  }
}

TEST(McProbability, PropertyComplementSumsToOne) {
  lptest::Gen g(81);
  for (int i = 0; i < 40; ++i) {
    const double cut = lptest::uniform(g, -0.5, 0.5);
    const std::uint64_t seed = g();
    const Domain d = BridgeDomain{kSymmetric};
    const double below = mc_probability(d, event({{0.5, -0.5, cut}}), 5000, 2, seed).mean;
    const double above = mc_probability(d, event({{0.5, std::nextafter(cut, INFINITY), 0.5}}), 5000, 2, seed).mean;
    EXPECT_EQ(std::llround(below * 5000) + std::llround(above * 5000), 5000);
  }
}

TEST(McProbability, PropertyDepthStability) {
  lptest::Gen g(82);
  for (int i = 0; i < 20; ++i) {
    const BridgeSpec sp = lptest::random_spec(g);
    const Interval iv = midpoint_interval(sp);
    const double mid = 0.5 * (iv.lo + iv.hi);
    const double q = sp.r + 0.25 * (sp.s - sp.r);
    const auto ev = event({{sp.midtime(), mid, INFINITY}, {q, -INFINITY, sp.a + 0.1}});
    const std::uint64_t seed = g();
    const double coarse = mc_probability(BridgeDomain{sp}, ev, 3000, 2, seed).mean;
    EXPECT_EQ(coarse, mc_probability(BridgeDomain{sp}, ev, 3000, 3, seed).mean);
    EXPECT_EQ(coarse, mc_probability(BridgeDomain{sp}, ev, 3000, 6, seed).mean);
  }
}

TEST(OracleProbability, Examples) {
  const OracleResult one = oracle_probability(kSymmetric, event({{0.5, 0.0, 0.5}}), 1, 64);
  EXPECT_EQ(one.value, 0.5);
  EXPECT_EQ(one.error_indicator, 0.0);

  const OracleResult two = oracle_probability(kSymmetric, positive_at_quarters(), 2, 256);
  EXPECT_LE(two.error_indicator, 1e-3);
  EXPECT_NEAR(two.value, kPositiveAtQuartersExact, 1e-3);
  // frozen regression value of the 256-point rule
  EXPECT_NEAR(two.value, 0.374993, 5e-6);

  EXPECT_EQ(oracle_probability(kSymmetric, event({{0.5, 0.3, 0.2}}), 2, 16).value, 0.0);
}

TEST(OracleProbability, Errors) {
  EXPECT_EQ(error_code_of([] { oracle_probability(kSymmetric, event({}), 5, 2); }), Errc::dimension_too_large);
  EXPECT_EQ(error_code_of([] { oracle_probability(kSymmetric, event({}), 4, 64); }), Errc::dimension_too_large);
  EXPECT_EQ(error_code_of([] { oracle_probability(kSymmetric, event({}), 2, 7); }), Errc::invalid_domain);
  EXPECT_EQ(error_code_of([] { oracle_probability(kSymmetric, event({{0.1, 0, 1}}), 2, 8); }),
            Errc::event_time_not_on_grid);
}

TEST(OracleProbability, EndpointConstraints) {
  EXPECT_EQ(oracle_probability(kSymmetric, event({{0.0, 0.1, 1.0}}), 2, 8).value, 0.0);
  EXPECT_EQ(oracle_probability(kSymmetric, event({{1.0, -1.0, 1.0}}), 2, 8).value, 1.0);
}

TEST(OracleProbability, AgreesWithMonteCarloOnFixtures) {
  struct Fixture {
    BridgeSpec spec;
    int depth;
    std::uint64_t points;
    CylinderEvent ev;
  };
  const std::vector<Fixture> fixtures{
      {kSymmetric, 2, 256, positive_at_quarters()},
      {{0, 2, 0.5, -0.5, 1}, 2, 256, event({{0.5, -INFINITY, 0.6}, {1.5, -0.7, 0.0}})},
      {{1, 3, 0, 0.8, 1.5}, 3, 16, event({{1.5, 0.0, 0.9}, {2.5, 0.2, INFINITY}, {2.75, -INFINITY, 1.0}})},
  };
  for (const auto& f : fixtures) {
    const OracleResult o = oracle_probability(f.spec, f.ev, f.depth, f.points);
    const Estimate mc = mc_probability(BridgeDomain{f.spec}, f.ev, 400000, f.depth, 321);
    EXPECT_LE(std::abs(mc.mean - o.value), 3 * mc.std_error + o.error_indicator)
        << "oracle " << o.value << " mc " << mc.mean;
  }
}

TEST(LebesgueCylinder, Examples) {
  const Domain d = FreeSegmentDomain{0, 1, 1};
  EXPECT_EQ(lebesgue_cylinder(d, event({{0.0, 0.0, 1.0}}), 1000, 3, 1).mean, 1.0);
  EXPECT_EQ(lebesgue_cylinder(d, event({{0.0, 0.0, -1.0}}), 1000, 3, 1).mean, 0.0);
  EXPECT_EQ(lebesgue_cylinder(d, event({{0.0, 0.5, 0.5}}), 1000, 3, 1).mean, 0.0);
  for (double len : {0.5, 1.0, 2.0}) {
    EXPECT_EQ(lebesgue_cylinder(FreeHalfLineDomain{0.5, 2.0, 3}, event({{0.5, -1.0, -1.0 + len}}), 1000, 2, 9).mean,
              len);
  }
}

TEST(LebesgueCylinder, MatchesOuterQuadratureOverTheInitialValue) {
  // inner probability for a fixed a: x(1) ~ U[a - 1, a + 1], in [0, 1]
  auto inner = [](double a) { return std::max(0.0, std::min(a + 1, 1.0) - std::max(a - 1, 0.0)) / 2.0; };
  double outer = 0.0;
  const int m = 20000;
  for (int i = 0; i < m; ++i) outer += inner(2.0 * (i + 0.5) / m) * (2.0 / m);
  const Estimate e = lebesgue_cylinder(FreeSegmentDomain{0, 1, 1}, event({{0.0, 0.0, 2.0}, {1.0, 0.0, 1.0}}),
                                       400000, 3, 44);
  EXPECT_NEAR(e.mean, outer, 4 * e.std_error);
  EXPECT_NEAR(outer, 0.75, 1e-6);
}

TEST(LebesgueCylinder, Errors) {
  const Domain d = FreeSegmentDomain{0, 1, 1};
  EXPECT_EQ(error_code_of([&] { lebesgue_cylinder(d, event({{0.5, 0, 1}}), 10, 2, 1); }),
            Errc::unbounded_initial_constraint);
  EXPECT_EQ(error_code_of([&] { lebesgue_cylinder(d, event({{0.0, 0, INFINITY}}), 10, 2, 1); }),
            Errc::unbounded_initial_constraint);
  EXPECT_EQ(error_code_of([&] { lebesgue_cylinder(BridgeDomain{kSymmetric}, event({{0.0, 0, 1}}), 10, 2, 1); }),
            Errc::invalid_domain);
}

TEST(MarginalKs, Examples) {
  const double threshold = 1.63 / std::sqrt(1e5);
  EXPECT_LT(marginal_ks_check(kSymmetric, {1, 1}, 100000, 5), threshold);
  EXPECT_EQ(error_code_of([] { marginal_ks_check({0, 1, 0, 1, 1}, {1, 1}, 100, 5); }), Errc::degenerate_interval);
  EXPECT_LT(marginal_ks_check({0, 1, 3.0, 3.0, 1}, {1, 1}, 100000, 6), threshold);
  EXPECT_EQ(error_code_of([] { marginal_ks_check(kSymmetric, {2, 1}, 100, 5); }), Errc::invalid_domain);
}

TEST(MarginalKs, DetectsANonUniformSelector) {
  // the same statistic applied to smoothstep-selected midpoints is far above threshold
  std::vector<double> xs;
  for (int i = 0; i < 20000; ++i) {
    Rng rng = Rng::stream(8, i);
    xs.push_back(build_bridge(kSymmetric, sample_noise(1, rng), SmoothstepBridgeSelector{}).values[1]);
  }
  EXPECT_GT(ks_uniform_statistic(xs, -0.5, 0.5), 5 * 1.63 / std::sqrt(20000.0));
}

TEST(KsStatistic, HandComputedCases) {
  EXPECT_DOUBLE_EQ(ks_uniform_statistic({0.5}), 0.5);
  EXPECT_DOUBLE_EQ(ks_uniform_statistic({0.25, 0.75}), 0.25);
  EXPECT_DOUBLE_EQ(ks_uniform_statistic({1.0, 1.5}, 1.0, 2.0), 0.5);
  EXPECT_EQ(error_code_of([] { ks_uniform_statistic({0.1}, 1.0, 1.0); }), Errc::degenerate_interval);
}

TEST(RecoveredNoise, UniformAtNondegenerateNodes) {
  const auto per_node = recovered_noise_ks({0, 1, 0, 0.3, 1}, 3, 20000, 12);
  ASSERT_EQ(per_node.size(), 7u);
  // seven simultaneous tests: Bonferroni-adjusted 1% critical value
  for (const auto& k : per_node) {
    EXPECT_LT(k.statistic, 1.91 / std::sqrt(static_cast<double>(k.n_used))) << "node " << k.node.level << ","
                                                                             << k.node.odd_index;
  }
  const NodeKs pooled = pooled_recovered_noise_ks({0, 1, 0, 0.3, 1}, 3, 20000, 13);
  EXPECT_LT(pooled.statistic, 1.63 / std::sqrt(static_cast<double>(pooled.n_used)));
  EXPECT_EQ(error_code_of([] { pooled_recovered_noise_ks({0, 1, 0, 1, 1}, 2, 10, 1); }), Errc::degenerate_interval);
}
