#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "multigen/error.hpp"
#include "multigen/geometry.hpp"
#include "multigen/world_map.hpp"

namespace multigen {

/// Occupancy-grid resolution for the connectivity check, in world units.
inline constexpr double kConnectivityCell = 0.1;

struct Violation {
  std::string code;    // stable identifier, e.g. "edge index out of range"
  std::string detail;  // human-readable context
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view code) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; });
  }
  std::string summary() const {
    std::ostringstream out;
    for (const auto& v : violations) out << v.code << ": " << v.detail << '\n';
    return out.str();
  }
};

class MapValidationError : public Error {
 public:
  explicit MapValidationError(ValidationReport report)
      : Error("invalid map:\n" + report.summary()), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

namespace detail {

/// Boolean occupancy grid of cells whose centres are too close to a wall.
class ClearanceGrid {
 public:
  ClearanceGrid(const WorldMap& map, double radius, double cell) : cell_(cell) {
    Bounds b = map.bounds();
    for (const auto& s : map.spawns) {
      b.min.x = std::min(b.min.x, s.position.x);
      b.min.y = std::min(b.min.y, s.position.y);
      b.max.x = std::max(b.max.x, s.position.x);
      b.max.y = std::max(b.max.y, s.position.y);
    }
    const double pad = radius + 2.0 * cell;
    origin_ = {b.min.x - pad, b.min.y - pad};
    nx_ = static_cast<std::size_t>(std::ceil((b.width() + 2.0 * pad) / cell)) + 1;
    ny_ = static_cast<std::size_t>(std::ceil((b.height() + 2.0 * pad) / cell)) + 1;
    blocked_.assign(nx_ * ny_, 0);
    for (std::size_t e = 0; e < map.edges.size(); ++e) {
      const auto [a, c] = map.segment(e);
      if (distance(a, c) < kIntersectEpsilon) continue;
      const std::size_t x0 = index_of(std::min(a.x, c.x) - radius - origin_.x, nx_);
      const std::size_t x1 = index_of(std::max(a.x, c.x) + radius - origin_.x, nx_);
      const std::size_t y0 = index_of(std::min(a.y, c.y) - radius - origin_.y, ny_);
      const std::size_t y1 = index_of(std::max(a.y, c.y) + radius - origin_.y, ny_);
      for (std::size_t y = y0; y <= y1; ++y) {
        for (std::size_t x = x0; x <= x1; ++x) {
          if (point_segment_distance(center(x, y), a, c) < radius) blocked_[y * nx_ + x] = 1;
        }
      }
    }
  }

  /// Free cell nearest to p (searching a small neighbourhood), if any.
  std::optional<std::size_t> free_cell_near(Vec2 p) const {
    const auto cx = static_cast<long long>(std::floor((p.x - origin_.x) / cell_));
    const auto cy = static_cast<long long>(std::floor((p.y - origin_.y) / cell_));
    std::optional<std::size_t> best;
    double best_d = 0.0;
    for (long long dy = -1; dy <= 1; ++dy) {
      for (long long dx = -1; dx <= 1; ++dx) {
        const long long x = cx + dx;
        const long long y = cy + dy;
        if (x < 0 || y < 0 || x >= static_cast<long long>(nx_) || y >= static_cast<long long>(ny_)) continue;
        const std::size_t idx = static_cast<std::size_t>(y) * nx_ + static_cast<std::size_t>(x);
        if (blocked_[idx]) continue;
        const double d = distance(p, center(static_cast<std::size_t>(x), static_cast<std::size_t>(y)));
        if (!best || d < best_d) {
          best = idx;
          best_d = d;
        }
      }
    }
    return best;
  }

  /// 4-connected flood fill from `start`.
  std::vector<std::uint8_t> reachable_from(std::size_t start) const {
    std::vector<std::uint8_t> seen(blocked_.size(), 0);
    std::deque<std::size_t> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      const std::size_t idx = queue.front();
      queue.pop_front();
      const std::size_t x = idx % nx_;
      const std::size_t y = idx / nx_;
      auto visit = [&](std::size_t n) {
        if (!blocked_[n] && !seen[n]) {
          seen[n] = 1;
          queue.push_back(n);
        }
      };
      if (x > 0) visit(idx - 1);
      if (x + 1 < nx_) visit(idx + 1);
      if (y > 0) visit(idx - nx_);
      if (y + 1 < ny_) visit(idx + nx_);
    }
    return seen;
  }

 private:
  std::size_t index_of(double offset, std::size_t n) const {
    const double i = std::floor(offset / cell_);
    if (i < 0) return 0;
    return std::min(static_cast<std::size_t>(i), n - 1);
  }
  Vec2 center(std::size_t x, std::size_t y) const {
    return {origin_.x + (static_cast<double>(x) + 0.5) * cell_, origin_.y + (static_cast<double>(y) + 0.5) * cell_};
  }

  double cell_;
  Vec2 origin_;
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::vector<std::uint8_t> blocked_;
};

}  // namespace detail

/// Checks the structural map invariants: index ranges, degenerate and
/// duplicate edges, non-empty spawns and spawn clearance.
inline ValidationReport validate_structure(const WorldMap& map, double collision_radius = kDefaultCollisionRadius) {
  ValidationReport report;
  auto add = [&](std::string code, std::string detail) {
    report.violations.push_back({std::move(code), std::move(detail)});
  };

  for (std::size_t i = 0; i < map.vertices.size(); ++i) {
    if (!std::isfinite(map.vertices[i].x) || !std::isfinite(map.vertices[i].y)) {
      add("non-finite vertex", "vertex " + std::to_string(i));
    }
  }

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t i = 0; i < map.edges.size(); ++i) {
    const Edge& e = map.edges[i];
    if (e.a >= map.vertices.size() || e.b >= map.vertices.size()) {
      add("edge index out of range", "edge " + std::to_string(i) + " = [" + std::to_string(e.a) + ", " +
                                         std::to_string(e.b) + "] with " + std::to_string(map.vertices.size()) +
                                         " vertices");
      continue;
    }
    if (distance(map.vertices[e.a], map.vertices[e.b]) < kIntersectEpsilon) {
      add("degenerate edge", "edge " + std::to_string(i) + " has zero length");
    }
    const auto key = std::minmax(e.a, e.b);
    if (!seen.insert(key).second) add("duplicate edge", "edge " + std::to_string(i));
  }

  if (map.spawns.empty()) add("no spawn points", "map declares no spawns");

  for (std::size_t s = 0; s < map.spawns.size(); ++s) {
    const SpawnPoint& sp = map.spawns[s];
    if (!std::isfinite(sp.position.x) || !std::isfinite(sp.position.y) || !std::isfinite(sp.yaw)) {
      add("non-finite spawn", "spawn " + std::to_string(s));
      continue;
    }
    // Clearance is checked against every well-formed edge, so one bad index does not hide other faults.
    for (std::size_t i = 0; i < map.edges.size(); ++i) {
      const Edge& e = map.edges[i];
      if (e.a >= map.vertices.size() || e.b >= map.vertices.size()) continue;
      const Vec2 a = map.vertices[e.a];
      const Vec2 b = map.vertices[e.b];
      if (distance(a, b) < kIntersectEpsilon) continue;
      if (point_segment_distance(sp.position, a, b) < collision_radius) {
        add("spawn clearance", "spawn " + std::to_string(s) + " is closer than " + std::to_string(collision_radius) +
                                   " to edge " + std::to_string(i));
        break;
      }
    }
  }
  return report;
}

/// Full validation: structural invariants plus reachability of every spawn
/// from spawn 0 on a `cell`-sized occupancy grid honouring the collision radius.
inline ValidationReport validate_map(const WorldMap& map, double collision_radius = kDefaultCollisionRadius,
                                     double cell = kConnectivityCell) {
  ValidationReport report = validate_structure(map, collision_radius);
  if (!report.ok() || map.spawns.size() < 2) return report;

  const detail::ClearanceGrid grid(map, collision_radius, cell);
  const auto start = grid.free_cell_near(map.spawns[0].position);
  if (!start) {
    report.violations.push_back({"spawn unreachable", "spawn 0 has no free grid cell"});
    return report;
  }
  const auto reached = grid.reachable_from(*start);
  for (std::size_t s = 1; s < map.spawns.size(); ++s) {
    const auto cell_idx = grid.free_cell_near(map.spawns[s].position);
    if (!cell_idx || !reached[*cell_idx]) {
      report.violations.push_back({"spawn unreachable", "spawn " + std::to_string(s) + " is not connected to spawn 0"});
    }
  }
  return report;
}

}  // namespace multigen
