#pragma once

// Hand-built maps shared by the unit and acceptance suites.

#include <string>
#include <vector>

#include "multigen/multigen.hpp"

namespace fixtures {

using multigen::Edge;
using multigen::SpawnPoint;
using multigen::Vec2;
using multigen::WorldMap;

/// Closed axis-aligned rectangle; edges bottom, right, top, left.
inline void add_box(WorldMap& m, double x0, double y0, double x1, double y1) {
  const std::size_t base = m.vertices.size();
  m.vertices.insert(m.vertices.end(), {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
  m.edges.insert(m.edges.end(), {{base, base + 1}, {base + 1, base + 2}, {base + 2, base + 3}, {base + 3, base}});
}

/// Square room of half-width `half` centred on the origin with spawns.
inline WorldMap square_room(double half = 5.0, std::vector<SpawnPoint> spawns = {{{0, 0}, 0.0}}) {
  WorldMap m;
  m.name = "square";
  add_box(m, -half, -half, half, half);
  m.spawns = std::move(spawns);
  return m;
}

/// Room 20x10 split by an interior wall x = 0, y in [-3, 3]; spawns face each other across it.
inline WorldMap wall_between() {
  WorldMap m;
  m.name = "wall-between";
  add_box(m, -10, -5, 10, 5);
  const std::size_t a = m.vertices.size();
  m.vertices.insert(m.vertices.end(), {{0, -3}, {0, 3}});
  m.edges.push_back({a, a + 1});
  m.spawns = {{{-5, 0}, 0.0}, {{5, 0}, multigen::kPi}, {{-5, 4}, 0.0}, {{5, 4}, -multigen::kPi}};
  return m;
}

/// Long corridor along +x, mirror-symmetric about y = 0.
inline WorldMap corridor() {
  WorldMap m;
  m.name = "corridor";
  add_box(m, -2, -1.5, 30, 1.5);
  m.spawns = {{{0, 0}, 0.0}};
  return m;
}

/// Two disjoint rooms, one spawn each.
inline WorldMap two_rooms() {
  WorldMap m;
  m.name = "two-rooms";
  add_box(m, 0, 0, 5, 5);
  add_box(m, 10, 0, 15, 5);
  m.spawns = {{{2.5, 2.5}, 0.0}, {{12.5, 2.5}, 0.0}};
  return m;
}

/// Box arena holding `pillars` square pillars laid out `per_row` to a row:
/// 4 + 4 * pillars wall segments.
inline WorldMap pillar_arena(int pillars, int per_row, double spacing = 4.0) {
  WorldMap m;
  m.name = "pillars";
  const int rows = (pillars + per_row - 1) / per_row;
  add_box(m, 0, 0, spacing * (per_row + 1), spacing * (rows + 1));
  for (int k = 0; k < pillars; ++k) {
    const double cx = spacing * (k % per_row + 1);
    const double cy = spacing * (k / per_row + 1);
    add_box(m, cx - 0.5, cy - 0.5, cx + 0.5, cy + 0.5);
  }
  // Spawns in the lane between the south wall and the first pillar row.
  for (int k = 0; k < 8; ++k) m.spawns.push_back({{spacing * (k % per_row + 1) + spacing / 2, spacing / 2}, 0.0});
  return m;
}

}  // namespace fixtures
