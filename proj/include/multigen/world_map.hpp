#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "multigen/vec2.hpp"

namespace multigen {

/// Player collision radius assumed when a caller does not supply one.
inline constexpr double kDefaultCollisionRadius = 0.4;

/// Undirected wall segment; indices are zero-based into WorldMap::vertices.
struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  bool operator==(const Edge&) const = default;
};

struct SpawnPoint {
  Vec2 position;
  double yaw = 0.0;
  bool operator==(const SpawnPoint&) const = default;
};

struct Bounds {
  Vec2 min;
  Vec2 max;
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
};

/// Static vector level: vertices, wall edges and spawn points.
///
/// The map is plain data. Whether it satisfies the level invariants is decided
/// by validate_map(); every consumer that needs the invariants (new_world,
/// load_map) checks them at its boundary.
struct WorldMap {
  std::string name;
  std::vector<Vec2> vertices;
  std::vector<Edge> edges;
  std::vector<SpawnPoint> spawns;

  std::pair<Vec2, Vec2> segment(std::size_t edge) const {
    return {vertices[edges[edge].a], vertices[edges[edge].b]};
  }

  /// Axis-aligned box around all vertices; the zero box for an empty map.
  Bounds bounds() const {
    if (vertices.empty()) return {};
    Bounds b{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
             {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
    for (Vec2 v : vertices) {
      b.min.x = std::min(b.min.x, v.x);
      b.min.y = std::min(b.min.y, v.y);
      b.max.x = std::max(b.max.x, v.x);
      b.max.y = std::max(b.max.y, v.y);
    }
    return b;
  }

  bool operator==(const WorldMap&) const = default;
};

}  // namespace multigen
