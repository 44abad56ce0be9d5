#include "lippath/extensions.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace lippath;
using lptest::error_code_of;

namespace {

EndpointNoise endpoint_noise(double endpoint, int depth, double interior) {
  return {endpoint, NoiseVector::filled(depth, interior)};
}

EndpointNoise random_endpoint_noise(lptest::Gen& g, int depth) {
  return {lptest::uniform(g, 0, 1), lptest::random_noise(g, depth)};
}

HalfLineNoise random_halfline_noise(lptest::Gen& g, double r, int horizon, int depth) {
  HalfLineNoise n;
  for (std::size_t k = 0; k < halfline_segment_count(r, horizon); ++k) n.segments.push_back(random_endpoint_noise(g, depth));
  return n;
}

// Mirror image of the noise under t -> r + s - t: node (m, k) trades places with (m, 2^m - k).
NoiseVector mirrored(const NoiseVector& w) {
  std::vector<double> v(w.size());
  for (std::size_t f = 0; f < w.size(); ++f) {
    const NodeId id = node_at_flat_index(f);
    v[flat_index({id.level, (std::uint64_t{1} << id.level) - id.odd_index})] = w[f];
  }
  return NoiseVector(w.depth(), std::move(v));
}

struct CubeInitialSelector {
  double operator()(double xi) const { return xi * xi * xi; }
  double invert(double x) const { return std::cbrt(x); }
};

}  // namespace

TEST(BuildPinnedLeft, Examples) {
  const GridPath p = build_pinned_left(0, 0, 1, 1, endpoint_noise(0.75, 2, 0.5), 2);
  EXPECT_DOUBLE_EQ(p.back(), 0.5);
  EXPECT_DOUBLE_EQ(p.values[2], 0.25);
  EXPECT_EQ(p.front(), 0.0);

  EXPECT_EQ(build_pinned_left(0, 0, 1, 1, endpoint_noise(0.5, 2, 0.5), 2).values, std::vector<double>(5, 0.0));

  lptest::Gen g(60);
  const GridPath line = build_pinned_left(0, 0, 1, 1, {1.0, lptest::random_noise(g, 3)}, 3);
  for (std::size_t j = 0; j < line.values.size(); ++j) EXPECT_EQ(line.values[j], j / 8.0);
}

TEST(BuildPinnedLeft, Errors) {
  EXPECT_EQ(error_code_of([] { build_pinned_left(0, 1, 0, 1, endpoint_noise(0.5, 2, 0.5), 2); }),
            Errc::invalid_domain);
  EXPECT_EQ(error_code_of([] { build_pinned_left(0, 0, 1, 1, endpoint_noise(0.5, 2, 0.5), 3); }),
            Errc::depth_mismatch);
  EXPECT_EQ(error_code_of([] { build_pinned_left(0, 0, 1, 1, endpoint_noise(1.5, 2, 0.5), 2); }),
            Errc::invalid_domain);
}

TEST(BuildPinnedLeft, PropertyEndpointLaw) {
  lptest::Gen g(61);
  for (int i = 0; i < 500; ++i) {
    const BridgeSpec sp = lptest::random_spec(g);
    const GridPath p = build_pinned_left(sp.a, sp.r, sp.s, sp.c, random_endpoint_noise(g, 5), 5);
    EXPECT_EQ(p.front(), sp.a);
    EXPECT_TRUE(free_interval(sp.r, sp.s, sp.a, sp.c).contains(p.back(), 1e-12 * (1 + std::abs(sp.a) + sp.width())));
    EXPECT_LE(lptest::brute_force_violation(p.grid.times(), p.values, sp.c), 1e-9 * sp.width());
  }
}

TEST(BuildPinnedRight, Examples) {
  EXPECT_EQ(build_pinned_right(0, 0, 1, 1, endpoint_noise(0.5, 2, 0.5), 2).values, std::vector<double>(5, 0.0));
  const GridPath p = build_pinned_right(0.5, 0, 1, 1, endpoint_noise(0.75, 2, 0.5), 2);
  EXPECT_DOUBLE_EQ(p.front(), 1.0);
  EXPECT_EQ(p.back(), 0.5);
  EXPECT_EQ(p.values, build_bridge({0, 1, 1.0, 0.5, 1}, NoiseVector::filled(2, 0.5)).values);
}

TEST(BuildPinnedRight, PropertyMirrorsPinnedLeft) {
  lptest::Gen g(62);
  for (int i = 0; i < 500; ++i) {
    const BridgeSpec sp = lptest::random_spec(g);
    const int depth = static_cast<int>(g() % 7);
    const EndpointNoise w = random_endpoint_noise(g, depth);
    const GridPath right = build_pinned_right(sp.b, sp.r, sp.s, sp.c, w, depth);
    const GridPath left = build_pinned_left(sp.b, sp.r, sp.s, sp.c, {w.endpoint, mirrored(w.interior)}, depth);
    const std::size_t last = right.values.size() - 1;
    for (std::size_t j = 0; j <= last; ++j) {
      EXPECT_NEAR(right.values[j], left.values[last - j], 1e-12 * (1 + std::abs(sp.b) + sp.width()) * 8);
    }
  }
}

TEST(HalfLineLayout, FirstSegmentEndsAtNextInteger) {
  EXPECT_EQ(first_segment_end(0.5), 1.0);
  EXPECT_EQ(first_segment_end(1.0), 2.0);
  EXPECT_EQ(first_segment_end(0.0), 1.0);
  EXPECT_EQ(halfline_segment_count(0.5, 3), 3u);
  EXPECT_EQ(halfline_segment_count(1.0, 3), 2u);
  EXPECT_EQ(halfline_segment_bounds(0.5, 0), (std::pair<double, double>{0.5, 1.0}));
  EXPECT_EQ(halfline_segment_bounds(0.5, 2), (std::pair<double, double>{2.0, 3.0}));
  EXPECT_EQ(error_code_of([] { halfline_segment_count(0.5, 0); }), Errc::invalid_horizon);
  EXPECT_EQ(error_code_of([] { halfline_segment_count(2.0, 2); }), Errc::invalid_horizon);
}

TEST(BuildHalfLine, Examples) {
  HalfLineNoise n;
  for (int k = 0; k < 3; ++k) n.segments.push_back(endpoint_noise(0.5, 3, 0.5));
  const HalfLinePath p = build_halfline(0, 0.5, 1, n, 3, 3);
  ASSERT_EQ(p.segments.size(), 3u);
  for (const auto& seg : p.segments) EXPECT_EQ(seg.values, std::vector<double>(9, 0.0));
  EXPECT_EQ(p.segments[0].grid.r(), 0.5);
  EXPECT_EQ(p.segments[2].grid.s(), 3.0);
}

TEST(BuildHalfLine, Errors) {
  HalfLineNoise n;
  n.segments.push_back(endpoint_noise(0.5, 2, 0.5));
  EXPECT_EQ(error_code_of([&] { build_halfline(0, 0.5, 1, n, 3, 2); }), Errc::invalid_horizon);
  EXPECT_EQ(error_code_of([&] { build_halfline(0, 0.5, 1, n, 0, 2); }), Errc::invalid_horizon);
}

TEST(BuildHalfLine, PropertyJunctionsAndGlobalLipschitz) {
  lptest::Gen g(63);
  for (int i = 0; i < 1000; ++i) {
    const double r = lptest::uniform(g, 0, 2);
    const double c = lptest::uniform(g, 0.1, 3);
    const double a = lptest::uniform(g, -3, 3);
    const int horizon = 3;
    const HalfLinePath p = build_halfline(a, r, c, random_halfline_noise(g, r, horizon, 3), horizon, 3);
    ASSERT_EQ(p.segments.size(), halfline_segment_count(r, horizon));
    EXPECT_EQ(p.segments.front().front(), a);
    for (std::size_t k = 1; k < p.segments.size(); ++k) {
      EXPECT_EQ(p.segments[k].front(), p.segments[k - 1].back());
      EXPECT_EQ(p.segments[k].grid.r(), p.segments[k - 1].grid.s());
    }
    const PathPoints pts = flatten(p);
    EXPECT_LE(lptest::brute_force_violation(pts.times, pts.values, c), 1e-9 * c * (horizon - r));
  }
}

TEST(BuildHalfLine, PropertyFirstSegmentIsThePinnedLeftBuild) {
  lptest::Gen g(64);
  for (int i = 0; i < 200; ++i) {
    const double r = lptest::uniform(g, 0, 2);
    const HalfLineNoise n = random_halfline_noise(g, r, 4, 4);
    const HalfLinePath p = build_halfline(1.5, r, 2.0, n, 4, 4);
    EXPECT_EQ(p.segments[0], build_pinned_left(1.5, r, first_segment_end(r), 2.0, n.segments[0], 4));
  }
}

TEST(Flatten, ListsJunctionsOnce) {
  HalfLineNoise n;
  for (int k = 0; k < 2; ++k) n.segments.push_back(endpoint_noise(0.5, 1, 0.5));
  const PathPoints pts = flatten(build_halfline(0, 1.0, 1, n, 3, 1));
  EXPECT_EQ(pts.times, (std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0}));
}

TEST(BuildFreeSegment, Examples) {
  const GridPath p = build_free_segment({2.0, endpoint_noise(0.5, 3, 0.5)}, 0, 1, 1, 3);
  EXPECT_EQ(p.values, std::vector<double>(9, 2.0));
  lptest::Gen g(65);
  for (int i = 0; i < 50; ++i) {
    const double a = lptest::uniform(g, -100, 100);
    EXPECT_EQ(build_free_segment({a, random_endpoint_noise(g, 2)}, 0, 1, 1, 2).front(), a);
    EXPECT_EQ(build_free_segment({a, random_endpoint_noise(g, 2)}, 0, 1, 1, 2, CubeInitialSelector{}).front(),
              a * a * a);
  }
}

TEST(InvertPinnedLeft, Examples) {
  const GridPath zero{DyadicGrid(0, 1, 2), 1.0, std::vector<double>(5, 0.0)};
  const EndpointNoise z = invert_pinned_left(zero);
  EXPECT_EQ(z.endpoint, 0.5);
  EXPECT_EQ(z.interior, NoiseVector::filled(2, 0.5));

  const GridPath line{DyadicGrid(0, 2, 2), 1.5, {1, 1.75, 2.5, 3.25, 4}};
  const EndpointNoise l = invert_pinned_left(line);
  EXPECT_EQ(l.endpoint, 1.0);
  EXPECT_EQ(l.interior, NoiseVector::filled(2, 0.0));
}

TEST(InvertPinnedLeft, RejectsEndpointOutsideTheCone) {
  const GridPath jump{DyadicGrid(0, 1, 1), 1.0, {0, 0.5, 1.5}};
  EXPECT_EQ(error_code_of([&] { invert_pinned_left(jump); }), Errc::path_violates_lipschitz);
}

TEST(InvertPinnedLeft, PropertyRoundTrip) {
  lptest::Gen g(66);
  for (int i = 0; i < 1000; ++i) {
    const BridgeSpec sp = lptest::random_spec(g);
    const GridPath p = build_pinned_left(sp.a, sp.r, sp.s, sp.c, random_endpoint_noise(g, 6), 6);
    const GridPath back = build_pinned_left(sp.a, sp.r, sp.s, sp.c, invert_pinned_left(p), 6);
    EXPECT_LE(lptest::max_abs_diff(p.values, back.values), 1e-12 * std::max(1.0, sp.width()) * 4);
  }
}

TEST(InvertPinnedRight, PropertyRoundTrip) {
  lptest::Gen g(67);
  for (int i = 0; i < 500; ++i) {
    const BridgeSpec sp = lptest::random_spec(g);
    const GridPath p = build_pinned_right(sp.b, sp.r, sp.s, sp.c, random_endpoint_noise(g, 5), 5);
    const GridPath back = build_pinned_right(sp.b, sp.r, sp.s, sp.c, invert_pinned_right(p), 5);
    EXPECT_LE(lptest::max_abs_diff(p.values, back.values), 1e-12 * std::max(1.0, sp.width()) * 4);
  }
}

TEST(InvertHalfLine, Examples) {
  HalfLinePath zero{0.5, 1.0, 3, {}};
  zero.segments.push_back({DyadicGrid(0.5, 1, 2), 1.0, std::vector<double>(5, 0.0)});
  zero.segments.push_back({DyadicGrid(1, 2, 2), 1.0, std::vector<double>(5, 0.0)});
  zero.segments.push_back({DyadicGrid(2, 3, 2), 1.0, std::vector<double>(5, 0.0)});
  const HalfLineNoise n = invert_halfline(zero);
  ASSERT_EQ(n.segments.size(), 3u);
  for (const auto& seg : n.segments) {
    EXPECT_EQ(seg.endpoint, 0.5);
    EXPECT_EQ(seg.interior, NoiseVector::filled(2, 0.5));
  }

  HalfLinePath broken = zero;
  broken.segments[1].values = {0.2, 0.2, 0.2, 0.2, 0.2};
  EXPECT_EQ(error_code_of([&] { invert_halfline(broken); }), Errc::junction_mismatch);

  HalfLinePath missing = zero;
  missing.segments.pop_back();
  EXPECT_EQ(error_code_of([&] { invert_halfline(missing); }), Errc::invalid_horizon);

  HalfLinePath shifted = zero;
  shifted.segments[2].grid = DyadicGrid(2, 3.5, 2);
  EXPECT_EQ(error_code_of([&] { invert_halfline(shifted); }), Errc::invalid_horizon);
}

TEST(InvertHalfLine, PropertyRoundTrip) {
  lptest::Gen g(68);
  for (int i = 0; i < 1000; ++i) {
    const double r = lptest::uniform(g, 0, 2);
    const double c = lptest::uniform(g, 0.1, 3);
    const double a = lptest::uniform(g, -3, 3);
    const HalfLinePath p = build_halfline(a, r, c, random_halfline_noise(g, r, 3, 4), 3, 4);
    const HalfLinePath back = build_halfline(a, r, c, invert_halfline(p), 3, 4);
    for (std::size_t k = 0; k < p.segments.size(); ++k) {
      EXPECT_LE(lptest::max_abs_diff(p.segments[k].values, back.segments[k].values), 1e-12 * std::max(1.0, c) * 4);
    }
  }
}

TEST(InvertFree, PropertyRoundTripsWithPluggedInitialSelector) {
  lptest::Gen g(69);
  for (int i = 0; i < 300; ++i) {
    const FreeNoise w{lptest::uniform(g, -2, 2), random_endpoint_noise(g, 4)};
    const GridPath p = build_free_segment(w, 0.25, 1.25, 1.5, 4, CubeInitialSelector{});
    const FreeNoise back = invert_free_segment(p, CubeInitialSelector{});
    EXPECT_NEAR(back.initial, w.initial, 1e-12 * 8);
    const GridPath rebuilt = build_free_segment(back, 0.25, 1.25, 1.5, 4, CubeInitialSelector{});
    EXPECT_LE(lptest::max_abs_diff(p.values, rebuilt.values), 1e-12 * 16);

    const FreeHalfLineNoise h{lptest::uniform(g, -2, 2), random_halfline_noise(g, 0.25, 3, 3)};
    const HalfLinePath hp = build_free_halfline(h, 0.25, 1.5, 3, 3);
    const FreeHalfLineNoise hb = invert_free_halfline(hp);
    EXPECT_EQ(hb.initial, h.initial);
    const HalfLinePath hr = build_free_halfline(hb, 0.25, 1.5, 3, 3);
    for (std::size_t k = 0; k < hp.segments.size(); ++k) {
      EXPECT_LE(lptest::max_abs_diff(hp.segments[k].values, hr.segments[k].values), 1e-12 * 16);
    }
  }
}
