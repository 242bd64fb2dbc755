#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "multigen/error.hpp"
#include "multigen/pose.hpp"
#include "multigen/vec2.hpp"
#include "multigen/world_map.hpp"

namespace multigen {

/// Tolerance for endpoint-inclusive intersection tests.
inline constexpr double kIntersectEpsilon = 1e-9;

/// Depth clamp used when converting distance to disparity.
inline constexpr double kMinDepth = 1e-3;

inline constexpr double kDefaultFov = kPi / 2.0;
inline constexpr int kDefaultColumns = 320;
inline constexpr double kDefaultMaxRange = 64.0;

struct Ray {
  Vec2 origin;
  Vec2 direction;  // unit length

  Ray(Vec2 origin_, Vec2 direction_) : origin(origin_), direction(direction_) {
    if (std::abs(length(direction) - 1.0) > 1e-9) throw GeometryError("ray direction is not unit length");
  }

  static Ray from_angle(Vec2 origin, double angle) { return Ray(origin, unit_from_angle(angle)); }

  Vec2 at(double t) const { return origin + direction * t; }
};

struct Hit {
  double distance = 0.0;
  std::optional<std::size_t> edge;  // nullopt on a miss
  Vec2 point;
};

/// Smallest t >= 0 such that ray.at(t) lies on the closed segment [a, b].
/// Collinear overlap yields the nearest overlapped point.
inline std::optional<double> ray_segment_intersection(const Ray& ray, Vec2 a, Vec2 b) {
  const Vec2 seg = b - a;
  const double seg_len = length(seg);
  if (seg_len < kIntersectEpsilon) throw GeometryError("degenerate segment");

  const Vec2 to_a = a - ray.origin;
  const double denom = cross(ray.direction, seg);
  if (std::abs(denom) <= 1e-12 * seg_len) {
    // Parallel. Only a collinear segment can be hit.
    if (std::abs(cross(to_a, ray.direction)) > kIntersectEpsilon) return std::nullopt;
    const double ta = dot(to_a, ray.direction);
    const double tb = dot(b - ray.origin, ray.direction);
    const double lo = std::min(ta, tb);
    const double hi = std::max(ta, tb);
    if (hi < 0.0) return std::nullopt;
    return std::max(lo, 0.0);
  }

  const double t = cross(to_a, seg) / denom;
  const double u = cross(to_a, ray.direction) / denom;
  const double u_eps = kIntersectEpsilon / seg_len;
  if (u < -u_eps || u > 1.0 + u_eps) return std::nullopt;
  if (t < -kIntersectEpsilon) return std::nullopt;
  return std::max(t, 0.0);
}

/// Nearest wall along the ray, clipped to max_range. Ties keep the lowest edge index.
inline Hit cast_depth(const WorldMap& map, const Ray& ray, double max_range) {
  Hit best{max_range, std::nullopt, ray.at(max_range)};
  for (std::size_t i = 0; i < map.edges.size(); ++i) {
    const auto [a, b] = map.segment(i);
    // Reject segments whose bounding box lies wholly behind the origin along both axes.
    if ((ray.direction.x > 0 && std::max(a.x, b.x) < ray.origin.x - kIntersectEpsilon) ||
        (ray.direction.x < 0 && std::min(a.x, b.x) > ray.origin.x + kIntersectEpsilon) ||
        (ray.direction.y > 0 && std::max(a.y, b.y) < ray.origin.y - kIntersectEpsilon) ||
        (ray.direction.y < 0 && std::min(a.y, b.y) > ray.origin.y + kIntersectEpsilon)) {
      continue;
    }
    const auto t = ray_segment_intersection(ray, a, b);
    if (t && *t < best.distance) best = Hit{*t, i, ray.at(*t)};
  }
  return best;
}

/// Angle of column j relative to the view axis.
///
/// Screen convention: column 0 is the leftmost column, which looks along the
/// largest bearing (counter-clockwise of the view axis). Readouts, the renderer
/// and sprite projection all use this mapping.
inline double column_offset(int column, int columns, double fov) {
  return fov * (0.5 - (column + 0.5) / columns);
}

/// Fractional screen column of a bearing (relative to the view axis).
inline double bearing_to_column(double bearing, int columns, double fov) {
  return columns * (0.5 - bearing / fov);
}

inline double to_disparity(double distance) { return 1.0 / std::max(distance, kMinDepth); }

/// Per-column depth sweep across the field of view.
struct DepthReadout {
  double fov = kDefaultFov;
  double max_range = kDefaultMaxRange;
  std::vector<Hit> hits;
  std::vector<double> disparity;

  int columns() const { return static_cast<int>(hits.size()); }
};

inline DepthReadout depth_readout(const WorldMap& map, const Pose& pose, double fov, int columns,
                                  double max_range) {
  if (!(fov > 0.0 && fov < kPi)) throw GeometryError("depth_readout: fov must lie in (0, pi)");
  if (columns < 1) throw GeometryError("depth_readout: need at least one column");
  if (!(max_range > 0.0)) throw GeometryError("depth_readout: max_range must be positive");
  DepthReadout out;
  out.fov = fov;
  out.max_range = max_range;
  out.hits.reserve(static_cast<std::size_t>(columns));
  out.disparity.reserve(static_cast<std::size_t>(columns));
  for (int j = 0; j < columns; ++j) {
    const Hit hit = cast_depth(map, Ray::from_angle(pose.position(), pose.theta() + column_offset(j, columns, fov)),
                               max_range);
    out.disparity.push_back(to_disparity(hit.distance));
    out.hits.push_back(hit);
  }
  return out;
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) throw GeometryError("degenerate segment");
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

/// Point-to-segment distance minus radius. Negative means penetration.
inline double circle_segment_distance(Vec2 center, double radius, Vec2 a, Vec2 b) {
  if (distance(a, b) < kIntersectEpsilon) throw GeometryError("degenerate segment");
  return point_segment_distance(center, a, b) - radius;
}

/// Distance from p to the nearest wall; +inf when the map has no edges.
inline double wall_clearance(const WorldMap& map, Vec2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < map.edges.size(); ++i) {
    const auto [a, b] = map.segment(i);
    best = std::min(best, point_segment_distance(p, a, b));
  }
  return best;
}

/// True when the walls keep at least `radius` away from p.
inline bool is_clear(const WorldMap& map, Vec2 p, double radius) {
  for (std::size_t i = 0; i < map.edges.size(); ++i) {
    const auto [a, b] = map.segment(i);
    // Cheap box reject before the exact distance.
    if (p.x + radius < std::min(a.x, b.x) || p.x - radius > std::max(a.x, b.x) ||
        p.y + radius < std::min(a.y, b.y) || p.y - radius > std::max(a.y, b.y)) {
      continue;
    }
    if (point_segment_distance(p, a, b) < radius) return false;
  }
  return true;
}

namespace detail {

/// Does the open segment (p, q) touch the closed segment [a, b]?
inline bool open_segment_blocked(Vec2 p, Vec2 q, Vec2 a, Vec2 b) {
  const Vec2 r = q - p;
  const Vec2 s = b - a;
  const double r_len = length(r);
  const double s_len = length(s);
  const Vec2 pa = a - p;
  const double denom = cross(r, s);
  if (std::abs(denom) <= 1e-12 * r_len * s_len) {
    if (std::abs(cross(pa, r)) > kIntersectEpsilon * r_len) return false;
    // Collinear: project the wall onto pq's parameter line.
    const double r2 = dot(r, r);
    const double ta = dot(pa, r) / r2;
    const double tb = dot(b - p, r) / r2;
    const double lo = std::min(ta, tb);
    const double hi = std::max(ta, tb);
    return hi > 0.0 && lo < 1.0;
  }
  const double t = cross(pa, s) / denom;
  const double u = cross(pa, r) / denom;
  const double t_eps = kIntersectEpsilon / r_len;
  const double u_eps = kIntersectEpsilon / s_len;
  return t > t_eps && t < 1.0 - t_eps && u >= -u_eps && u <= 1.0 + u_eps;
}

}  // namespace detail

/// True iff the open segment (p, q) crosses no wall. Grazing a wall endpoint blocks.
inline bool line_of_sight(const WorldMap& map, Vec2 p, Vec2 q) {
  // Canonical argument order makes the predicate exactly symmetric.
  if (q.x < p.x || (q.x == p.x && q.y < p.y)) std::swap(p, q);
  if (p == q) return true;
  const double lo_x = p.x;
  const double hi_x = q.x;
  const double lo_y = std::min(p.y, q.y);
  const double hi_y = std::max(p.y, q.y);
  for (std::size_t i = 0; i < map.edges.size(); ++i) {
    const auto [a, b] = map.segment(i);
    if (std::max(a.x, b.x) < lo_x - kIntersectEpsilon || std::min(a.x, b.x) > hi_x + kIntersectEpsilon ||
        std::max(a.y, b.y) < lo_y - kIntersectEpsilon || std::min(a.y, b.y) > hi_y + kIntersectEpsilon) {
      continue;
    }
    if (detail::open_segment_blocked(p, q, a, b)) return false;
  }
  return true;
}

/// Signed bearing of target relative to the viewer's facing, in [-pi, pi).
inline double relative_bearing(const Pose& viewer, Vec2 target) {
  const Vec2 d = target - viewer.position();
  return wrap_angle(std::atan2(d.y, d.x) - viewer.theta());
}

/// Range, field-of-view cone and line-of-sight test.
inline bool is_visible(const WorldMap& map, const Pose& viewer, Vec2 target, double fov, double max_range) {
  const Vec2 from = viewer.position();
  if (distance(from, target) > max_range) return false;
  if (from == target) return false;
  if (std::abs(relative_bearing(viewer, target)) > fov / 2.0) return false;
  return line_of_sight(map, from, target);
}

}  // namespace multigen
