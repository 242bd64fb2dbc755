#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "multigen/error.hpp"
#include "multigen/frame.hpp"
#include "multigen/map_validation.hpp"
#include "multigen/rng.hpp"
#include "multigen/world.hpp"
#include "multigen/world_map.hpp"

namespace multigen {

/// Parameters of the rooms-and-corridors generator. Lengths are world units.
struct LevelSpec {
  std::uint64_t seed = 0;
  int room_count = 6;
  double room_min = 4.0;
  double room_max = 10.0;
  double corridor_width = 2.0;
  double grid_extent = 64.0;

  void validate() const {
    if (room_count < 1) throw Error("level spec: room_count must be at least 1");
    if (!(room_min > 0.0 && room_min <= room_max)) throw Error("level spec: need 0 < room_min <= room_max");
    if (!(corridor_width >= 2.0 * kDefaultCollisionRadius + 0.1)) {
      throw Error("level spec: corridor_width must be at least 2 * collision radius + 0.1");
    }
    if (!(grid_extent >= room_max + 2.0)) throw Error("level spec: grid_extent too small for room_max");
  }
};

/// Carve grid resolution of the generator, in world units.
inline constexpr double kLevelCell = 0.5;

namespace detail {

struct CellRect {
  int x0, y0, x1, y1;  // half-open cell ranges
  int cx() const { return (x0 + x1) / 2; }
  int cy() const { return (y0 + y1) / 2; }
  bool overlaps(const CellRect& o, int margin) const {
    return x0 - margin < o.x1 && o.x0 < x1 + margin && y0 - margin < o.y1 && o.y0 < y1 + margin;
  }
};

class CarveGrid {
 public:
  explicit CarveGrid(int n) : n_(n), cells_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0) {}

  int size() const { return n_; }
  bool open(int x, int y) const {
    if (x < 0 || y < 0 || x >= n_ || y >= n_) return false;
    return cells_[static_cast<std::size_t>(y) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(x)] != 0;
  }
  void carve(int x0, int y0, int x1, int y1) {
    for (int y = std::max(y0, 1); y < std::min(y1, n_ - 1); ++y) {
      for (int x = std::max(x0, 1); x < std::min(x1, n_ - 1); ++x) {
        cells_[static_cast<std::size_t>(y) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(x)] = 1;
      }
    }
  }

 private:
  int n_;
  std::vector<std::uint8_t> cells_;
};

/// Boundary between open and solid cells as maximal straight wall runs.
/// Runs only merge when the open side is the same, so walls meet only at endpoints.
inline WorldMap trace_walls(const CarveGrid& grid, double cell) {
  WorldMap map;
  std::map<std::pair<int, int>, std::size_t> vertex_ids;
  auto vertex = [&](int gx, int gy) {
    auto [it, inserted] = vertex_ids.try_emplace({gx, gy}, map.vertices.size());
    if (inserted) map.vertices.push_back({gx * cell, gy * cell});
    return it->second;
  };
  auto emit = [&](int ax, int ay, int bx, int by) { map.edges.push_back({vertex(ax, ay), vertex(bx, by)}); };

  const int n = grid.size();
  // Horizontal boundaries on grid line y between cell rows y-1 and y.
  for (int y = 0; y <= n; ++y) {
    int run_start = 0;
    int run_type = 0;
    for (int x = 0; x <= n; ++x) {
      int type = 0;
      if (x < n) {
        const bool below = grid.open(x, y - 1);
        const bool above = grid.open(x, y);
        type = below == above ? 0 : (below ? 1 : -1);
      }
      if (type != run_type) {
        if (run_type != 0) emit(run_start, y, x, y);
        run_start = x;
        run_type = type;
      }
    }
  }
  // Vertical boundaries on grid line x between cell columns x-1 and x.
  for (int x = 0; x <= n; ++x) {
    int run_start = 0;
    int run_type = 0;
    for (int y = 0; y <= n; ++y) {
      int type = 0;
      if (y < n) {
        const bool left = grid.open(x - 1, y);
        const bool right = grid.open(x, y);
        type = left == right ? 0 : (left ? 1 : -1);
      }
      if (type != run_type) {
        if (run_type != 0) emit(x, run_start, x, y);
        run_start = y;
        run_type = type;
      }
    }
  }
  return map;
}

}  // namespace detail

/// Rooms-and-corridors generator: non-overlapping rooms on a 0.5-unit carve
/// grid joined by L-shaped corridors into one component; walls traced from the
/// carved region; one spawn per room centre. Pure function of the spec.
inline WorldMap generate_map(const LevelSpec& spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  const int n = static_cast<int>(std::floor(spec.grid_extent / kLevelCell));
  const int min_cells = static_cast<int>(std::ceil(spec.room_min / kLevelCell));
  const int max_cells = static_cast<int>(std::floor(spec.room_max / kLevelCell));
  const int corridor_cells = static_cast<int>(std::ceil(spec.corridor_width / kLevelCell));
  const int margin = 2;  // solid cells kept between rooms
  constexpr int kAttemptsPerRoom = 200;

  std::vector<detail::CellRect> rooms;
  for (int r = 0; r < spec.room_count; ++r) {
    bool placed = false;
    for (int attempt = 0; attempt < kAttemptsPerRoom && !placed; ++attempt) {
      const int w = static_cast<int>(rng.range(min_cells, max_cells));
      const int h = static_cast<int>(rng.range(min_cells, max_cells));
      if (w + 2 >= n || h + 2 >= n) break;
      const int x0 = static_cast<int>(rng.range(1, n - 1 - w));
      const int y0 = static_cast<int>(rng.range(1, n - 1 - h));
      const detail::CellRect room{x0, y0, x0 + w, y0 + h};
      if (std::any_of(rooms.begin(), rooms.end(), [&](const auto& o) { return room.overlaps(o, margin); })) continue;
      rooms.push_back(room);
      placed = true;
    }
    if (!placed) throw Error("spec infeasible: could not place room " + std::to_string(r));
  }

  detail::CarveGrid grid(n);
  for (const auto& room : rooms) grid.carve(room.x0, room.y0, room.x1, room.y1);

  // Each room links to the nearest earlier room (Manhattan distance between
  // centres), which keeps the layout a single tree-connected component.
  const int half_lo = corridor_cells / 2;
  const int half_hi = corridor_cells - half_lo;
  for (std::size_t i = 1; i < rooms.size(); ++i) {
    std::size_t target = 0;
    int best = -1;
    for (std::size_t j = 0; j < i; ++j) {
      const int d = std::abs(rooms[i].cx() - rooms[j].cx()) + std::abs(rooms[i].cy() - rooms[j].cy());
      if (best < 0 || d < best) {
        best = d;
        target = j;
      }
    }
    const int ax = rooms[i].cx();
    const int ay = rooms[i].cy();
    const int bx = rooms[target].cx();
    const int by = rooms[target].cy();
    if (rng.below(2) == 0) {
      grid.carve(std::min(ax, bx) - half_lo, ay - half_lo, std::max(ax, bx) + half_hi, ay + half_hi);
      grid.carve(bx - half_lo, std::min(ay, by) - half_lo, bx + half_hi, std::max(ay, by) + half_hi);
    } else {
      grid.carve(ax - half_lo, std::min(ay, by) - half_lo, ax + half_hi, std::max(ay, by) + half_hi);
      grid.carve(std::min(ax, bx) - half_lo, by - half_lo, std::max(ax, bx) + half_hi, by + half_hi);
    }
  }

  WorldMap map = detail::trace_walls(grid, kLevelCell);
  map.name = "gen-" + std::to_string(spec.seed);
  for (const auto& room : rooms) {
    const double yaw = wrap_angle(static_cast<double>(rng.below(4)) * (kPi / 2.0));
    map.spawns.push_back({{(room.x0 + room.x1) * kLevelCell / 2.0, (room.y0 + room.y1) * kLevelCell / 2.0}, yaw});
  }
  return map;
}

/// Top-down rendering of a map with pose arrows.
struct MinimapImage {
  Frame frame;
  double scale = 1.0;  // pixels per world unit
  Vec2 origin;         // world point at the image's reference corner
  int margin = 0;

  /// Continuous pixel coordinates of a world point (y grows downwards).
  std::pair<double, double> project(Vec2 p) const {
    return {margin + (p.x - origin.x) * scale, margin + (origin.y - p.y) * scale};
  }
};

inline constexpr int kMinimapMargin = 4;

/// Offsets (right, up) in pixels of the 5-pixel arrowhead for a heading.
inline std::vector<std::pair<int, int>> arrowhead_offsets(double theta) {
  const Vec2 f = unit_from_angle(theta);
  const Vec2 l{-f.y, f.x};
  const Vec2 pts[] = {{0, 0}, f, f * 2.0, f * -1.0 + l, f * -1.0 - l};
  std::vector<std::pair<int, int>> out;
  for (Vec2 p : pts) out.emplace_back(static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y)));
  return out;
}

inline MinimapImage rasterize_minimap(const WorldMap& map, const std::vector<std::pair<PlayerId, Pose>>& poses,
                                      double scale) {
  if (!(scale > 0.0)) throw Error("minimap scale must be positive");
  const Bounds b = map.bounds();
  MinimapImage img;
  img.scale = scale;
  img.margin = kMinimapMargin;
  img.origin = {b.min.x, b.max.y};
  const int w = static_cast<int>(std::ceil(b.width() * scale)) + 2 * kMinimapMargin + 1;
  const int h = static_cast<int>(std::ceil(b.height() * scale)) + 2 * kMinimapMargin + 1;
  img.frame = Frame(w, h, kMinimapBackground);

  for (std::size_t e = 0; e < map.edges.size(); ++e) {
    const auto [a, c] = map.segment(e);
    const auto [ax, ay] = img.project(a);
    const auto [cx, cy] = img.project(c);
    // Half-open DDA: a wall L pixels long covers exactly L pixels.
    const long steps = std::lround(std::max(std::abs(cx - ax), std::abs(cy - ay)));
    if (steps == 0) {
      img.frame.plot(static_cast<int>(std::floor(ax)), static_cast<int>(std::floor(ay)), kMinimapWall);
      continue;
    }
    for (long i = 0; i < steps; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(steps);
      img.frame.plot(static_cast<int>(std::floor(ax + (cx - ax) * t)), static_cast<int>(std::floor(ay + (cy - ay) * t)),
                     kMinimapWall);
    }
  }

  for (const auto& [id, pose] : poses) {
    const auto [px, py] = img.project(pose.position());
    const int x = static_cast<int>(std::floor(px));
    const int y = static_cast<int>(std::floor(py));
    for (const auto& [dx, dy] : arrowhead_offsets(pose.theta())) img.frame.plot(x + dx, y - dy, player_color(id));
  }
  return img;
}

}  // namespace multigen
