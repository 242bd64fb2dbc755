#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "multigen/multigen.hpp"
#include "oracles.hpp"

using namespace multigen;

TEST(RaySegment, PerpendicularWall) {
  const Ray r({0, 0}, {1, 0});
  const auto t = ray_segment_intersection(r, {10, -1}, {10, 1});
  ASSERT_TRUE(t);
  EXPECT_DOUBLE_EQ(*t, 10.0);
}

TEST(RaySegment, BehindOriginMisses) {
  const Ray r({0, 0}, {1, 0});
  EXPECT_FALSE(ray_segment_intersection(r, {-5, -1}, {-5, 1}));
}

TEST(RaySegment, EndpointsAreInclusive) {
  const Ray r({0, 0}, {1, 0});
  EXPECT_TRUE(ray_segment_intersection(r, {4, 0}, {4, 3}));
  EXPECT_TRUE(ray_segment_intersection(r, {4, -3}, {4, 0}));
}

TEST(RaySegment, CollinearOverlapReturnsNearestPoint) {
  const Ray r({0, 0}, {1, 0});
  EXPECT_DOUBLE_EQ(*ray_segment_intersection(r, {7, 0}, {3, 0}), 3.0);
  EXPECT_DOUBLE_EQ(*ray_segment_intersection(r, {-2, 0}, {3, 0}), 0.0);
  EXPECT_FALSE(ray_segment_intersection(r, {-7, 0}, {-3, 0}));
}

TEST(RaySegment, DegenerateSegmentThrows) {
  const Ray r({0, 0}, {1, 0});
  EXPECT_THROW(ray_segment_intersection(r, {1, 1}, {1, 1}), GeometryError);
}

TEST(RaySegment, RejectsNonUnitDirection) { EXPECT_THROW(Ray({0, 0}, {2, 0}), GeometryError); }

TEST(RaySegment, AgreesWithMarcherOnRandomCases) {
  SplitMix64 rng(11);
  int hits = 0;
  for (int i = 0; i < 300; ++i) {
    const Vec2 o{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const Ray r = Ray::from_angle(o, rng.uniform(-kPi, kPi));
    const Vec2 a{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const Vec2 b{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const auto got = ray_segment_intersection(r, a, b);
    const auto want = oracle::march_ray(o, r.direction, a, b, 15.0);
    ASSERT_EQ(got.has_value(), want.has_value()) << "case " << i;
    if (got) {
      ++hits;
      EXPECT_NEAR(*got, *want, 2e-3) << "case " << i;
    }
  }
  EXPECT_GT(hits, 30);
}

TEST(CastDepth, EmptyMapMisses) {
  WorldMap m;
  const Hit h = cast_depth(m, Ray({0, 0}, {1, 0}), 64);
  EXPECT_EQ(h.distance, 64);
  EXPECT_FALSE(h.edge);
}

TEST(CastDepth, CentredInSquare) {
  const WorldMap m = fixtures::square_room(5);
  const Hit h = cast_depth(m, Ray({0, 0}, {1, 0}), 64);
  EXPECT_DOUBLE_EQ(h.distance, 5.0);
  ASSERT_TRUE(h.edge);
  EXPECT_EQ(*h.edge, 1u);
}

TEST(CastDepth, ClipsToMaxRange) {
  const WorldMap m = fixtures::square_room(5);
  const Hit h = cast_depth(m, Ray({0, 0}, {1, 0}), 3);
  EXPECT_EQ(h.distance, 3);
  EXPECT_FALSE(h.edge);
}

TEST(CastDepth, MatchesExhaustiveMinimumOnGeneratedMap) {
  LevelSpec spec;
  spec.seed = 3;
  const WorldMap m = generate_map(spec);
  SplitMix64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Ray r = Ray::from_angle({rng.uniform(0, 64), rng.uniform(0, 64)}, rng.uniform(-kPi, kPi));
    const Hit got = cast_depth(m, r, 64);
    const auto want = oracle::exhaustive_min(m, r, 64);
    EXPECT_EQ(got.edge, want.edge);
    EXPECT_NEAR(got.distance, want.distance, 1e-9);
    // Never farther than any single edge hit.
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
      const auto [a, b] = m.segment(e);
      if (auto t = ray_segment_intersection(r, a, b)) {
        EXPECT_LE(got.distance, *t);
      }
    }
  }
}

TEST(DepthReadout, SingleColumnLooksStraightAhead) {
  const WorldMap m = fixtures::square_room(5);
  const auto r = depth_readout(m, Pose(0, 0, 0.3), 1.0, 1, 64);
  ASSERT_EQ(r.columns(), 1);
  EXPECT_DOUBLE_EQ(column_offset(0, 1, 1.0), 0.0);
  const Hit straight = cast_depth(m, Ray::from_angle({0, 0}, 0.3), 64);
  EXPECT_EQ(r.hits[0].distance, straight.distance);
}

TEST(DepthReadout, EmptyMapGivesInverseMaxRange) {
  WorldMap m;
  const auto r = depth_readout(m, Pose(1, 2, 0), kDefaultFov, 16, 64);
  for (double d : r.disparity) EXPECT_DOUBLE_EQ(d, 1.0 / 64);
}

TEST(DepthReadout, ColumnZeroIsLeftmost) {
  const WorldMap m = fixtures::square_room(5);
  const auto r = depth_readout(m, Pose(0, 0, 0), kDefaultFov, 8, 64);
  // Left (counter-clockwise) of +x is +y.
  EXPECT_GT(r.hits.front().point.y, 0);
  EXPECT_LT(r.hits.back().point.y, 0);
}

TEST(DepthReadout, MirrorSymmetricCorridor) {
  const WorldMap m = fixtures::corridor();
  const int k = 64;
  const auto r = depth_readout(m, Pose(0, 0, 0), kDefaultFov, k, 64);
  for (int j = 0; j < k; ++j) EXPECT_NEAR(r.disparity[j], r.disparity[k - 1 - j], 1e-9) << j;
}

TEST(DepthReadout, DisparityBounds) {
  const WorldMap m = fixtures::square_room(5);
  SplitMix64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const auto r = depth_readout(m, Pose(rng.uniform(-4.9, 4.9), rng.uniform(-4.9, 4.9), rng.uniform(-3, 3)), 1.2, 32, 8);
    for (double d : r.disparity) {
      EXPECT_GE(d, 1.0 / 8);
      EXPECT_LE(d, 1.0 / kMinDepth);
    }
  }
}

TEST(DepthReadout, InvariantUnderRigidMotion) {
  LevelSpec spec;
  spec.seed = 9;
  const WorldMap m = generate_map(spec);
  const Pose pose(m.spawns[0].position, 0.4);
  const auto base = depth_readout(m, pose, kDefaultFov, 64, 64);

  const Vec2 shift{13.25, -7.5};
  WorldMap moved = m;
  for (auto& v : moved.vertices) v = v + shift;
  const auto translated = depth_readout(moved, Pose(pose.position() + shift, pose.theta()), kDefaultFov, 64, 64);

  const double rot = 0.7;
  WorldMap turned = m;
  const Vec2 c = pose.position();
  for (auto& v : turned.vertices) {
    const Vec2 d = v - c;
    v = c + Vec2{d.x * std::cos(rot) - d.y * std::sin(rot), d.x * std::sin(rot) + d.y * std::cos(rot)};
  }
  const auto rotated = depth_readout(turned, Pose(c, pose.theta() + rot), kDefaultFov, 64, 64);

  for (int j = 0; j < 64; ++j) {
    EXPECT_NEAR(base.hits[j].distance, translated.hits[j].distance, 1e-9);
    EXPECT_NEAR(base.hits[j].distance, rotated.hits[j].distance, 1e-9);
  }
}

TEST(DepthReadout, RejectsBadArguments) {
  WorldMap m;
  EXPECT_THROW(depth_readout(m, Pose(), kPi, 4, 1), GeometryError);
  EXPECT_THROW(depth_readout(m, Pose(), 1.0, 0, 1), GeometryError);
}

TEST(LineOfSight, EmptyMapIsClear) {
  WorldMap m;
  EXPECT_TRUE(line_of_sight(m, {0, 0}, {10, 3}));
}

TEST(LineOfSight, BisectingWallBlocks) {
  const WorldMap m = fixtures::wall_between();
  EXPECT_FALSE(line_of_sight(m, {-5, 0}, {5, 0}));
  EXPECT_TRUE(line_of_sight(m, {-5, 4}, {5, 4}));
}

TEST(LineOfSight, GrazingWallEndpointBlocks) {
  const WorldMap m = fixtures::wall_between();
  EXPECT_FALSE(line_of_sight(m, {-5, 3}, {5, 3}));
  EXPECT_FALSE(line_of_sight(m, {-5, 1}, {5, 5}));  // passes through (0, 3)
}

TEST(LineOfSight, SymmetricOverRandomPairs) {
  LevelSpec spec;
  spec.seed = 17;
  const WorldMap m = generate_map(spec);
  SplitMix64 rng(8);
  for (int i = 0; i < 10000; ++i) {
    const Vec2 p{rng.uniform(0, 64), rng.uniform(0, 64)};
    const Vec2 q{rng.uniform(0, 64), rng.uniform(0, 64)};
    ASSERT_EQ(line_of_sight(m, p, q), line_of_sight(m, q, p)) << i;
  }
}

TEST(IsVisible, AheadInEmptyMap) {
  WorldMap m;
  EXPECT_TRUE(is_visible(m, Pose(0, 0, 0), {1, 0}, kDefaultFov, 64));
}

TEST(IsVisible, BehindIsNotVisible) {
  WorldMap m;
  EXPECT_FALSE(is_visible(m, Pose(0, 0, 0), {-1, 0}, kDefaultFov, 64));
  EXPECT_FALSE(is_visible(m, Pose(0, 0, 0), {-1, 0}, 3.1, 64));
}

TEST(IsVisible, RangeAndConeLimits) {
  WorldMap m;
  EXPECT_FALSE(is_visible(m, Pose(0, 0, 0), {10, 0}, kDefaultFov, 9.5));
  EXPECT_TRUE(is_visible(m, Pose(0, 0, 0), {1, 0.9}, kDefaultFov, 64));
  EXPECT_FALSE(is_visible(m, Pose(0, 0, 0), {1, 1.1}, kDefaultFov, 64));
}

TEST(IsVisible, OcclusionAgreesWithDepthCast) {
  const WorldMap m = fixtures::wall_between();
  SplitMix64 rng(4);
  for (int i = 0; i < 2000; ++i) {
    const Pose viewer(rng.uniform(-9.5, -0.5), rng.uniform(-4.5, 4.5), rng.uniform(-kPi, kPi));
    const Vec2 target{rng.uniform(0.5, 9.5), rng.uniform(-4.5, 4.5)};
    const Vec2 d = target - viewer.position();
    const double dist = length(d);
    const Hit hit = cast_depth(m, Ray(viewer.position(), d * (1.0 / dist)), 64);
    const bool in_cone = std::abs(relative_bearing(viewer, target)) <= kDefaultFov / 2;
    const bool wall_first = hit.distance < dist - 1e-7;
    if (std::abs(hit.distance - dist) < 1e-6) continue;  // grazing, left to the endpoint rule
    EXPECT_EQ(is_visible(m, viewer, target, kDefaultFov, 64), in_cone && !wall_first) << i;
    if (is_visible(m, viewer, target, kDefaultFov, 64)) {
      EXPECT_TRUE(line_of_sight(m, viewer.position(), target));
    }
  }
}

TEST(CircleSegment, MidlineAtTwoRadii) {
  EXPECT_NEAR(circle_segment_distance({0, 0.8}, 0.4, {-1, 0}, {1, 0}), 0.4, 1e-15);
}

TEST(CircleSegment, CentreOnSegment) {
  EXPECT_NEAR(circle_segment_distance({0.3, 0}, 0.4, {-1, 0}, {1, 0}), -0.4, 1e-15);
}

TEST(CircleSegment, DegenerateThrows) { EXPECT_THROW(circle_segment_distance({0, 0}, 1, {2, 2}, {2, 2}), GeometryError); }

TEST(CircleSegment, AgreesWithDenseSampling) {
  SplitMix64 rng(21);
  for (int i = 0; i < 2000; ++i) {
    const Vec2 c{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Vec2 a{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Vec2 b{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const double r = rng.uniform(0.1, 1);
    // Sampling error is bounded by half the sample spacing squared over distance; 2e5 samples keep it < 1e-6.
    const double want = oracle::sampled_seg_dist(c, a, b, 200000) - r;
    ASSERT_NEAR(circle_segment_distance(c, r, a, b), want, 1e-6) << i;
  }
}

TEST(WrapAngle, CanonicalRange) {
  EXPECT_EQ(wrap_angle(0.0), 0.0);
  EXPECT_EQ(wrap_angle(kPi), -kPi);
  EXPECT_NEAR(wrap_angle(3 * kPi + 0.1), -kPi + 0.1, 1e-12);
  EXPECT_THROW(wrap_angle(std::nan("")), GeometryError);
  SplitMix64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.uniform(-100, 100);
    const double w = wrap_angle(a);
    ASSERT_GE(w, -kPi);
    ASSERT_LT(w, kPi);
    ASSERT_NEAR(w, oracle::wrap_by_steps(a), 1e-12);
  }
}
