#pragma once

// Independent reference computations used by tests. Nothing here calls the
// library routine it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "multigen/multigen.hpp"

namespace oracle {

using multigen::Vec2;

/// Point-to-segment distance by projection, written separately from the library.
inline double seg_dist(Vec2 p, Vec2 a, Vec2 b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double wx = p.x - a.x, wy = p.y - a.y;
  const double c1 = vx * wx + vy * wy;
  if (c1 <= 0) return std::sqrt(wx * wx + wy * wy);
  const double c2 = vx * vx + vy * vy;
  if (c2 <= c1) return std::sqrt((p.x - b.x) * (p.x - b.x) + (p.y - b.y) * (p.y - b.y));
  const double t = c1 / c2;
  const double px = a.x + t * vx - p.x, py = a.y + t * vy - p.y;
  return std::sqrt(px * px + py * py);
}

/// Dense sampling along the segment: min distance from p over `samples` points.
inline double sampled_seg_dist(Vec2 p, Vec2 a, Vec2 b, int samples) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= samples; ++i) {
    const double t = static_cast<double>(i) / samples;
    const double x = a.x + (b.x - a.x) * t - p.x;
    const double y = a.y + (b.y - a.y) * t - p.y;
    best = std::min(best, std::sqrt(x * x + y * y));
  }
  return best;
}

/// Fine-step ray marcher. Steps `step` along the ray; the first contiguous run
/// of samples closer than `threshold` to the segment is a contact, and the
/// sample of minimum distance inside that run is reported.
inline std::optional<double> march_ray(Vec2 origin, Vec2 dir, Vec2 a, Vec2 b, double t_max, double step = 1e-4,
                                       double threshold = 1e-4) {
  bool contact = false;
  double best_t = 0, best_d = 0;
  const long n = static_cast<long>(t_max / step);
  for (long i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * step;
    const double d = seg_dist({origin.x + dir.x * t, origin.y + dir.y * t}, a, b);
    if (d < threshold) {
      if (!contact || d < best_d) {
        best_t = t;
        best_d = d;
      }
      contact = true;
    } else if (contact) {
      break;
    }
  }
  if (!contact) return std::nullopt;
  return best_t;
}

struct ExhaustiveHit {
  double distance;
  std::optional<std::size_t> edge;
};

/// Per-edge minimum over every wall with first-index tie breaking.
inline ExhaustiveHit exhaustive_min(const multigen::WorldMap& map, const multigen::Ray& ray, double max_range) {
  ExhaustiveHit best{max_range, std::nullopt};
  for (std::size_t i = 0; i < map.edges.size(); ++i) {
    const auto [a, b] = map.segment(i);
    const auto t = multigen::ray_segment_intersection(ray, a, b);
    if (t && *t < best.distance) best = {*t, i};
  }
  return best;
}

/// Wrap by repeated subtraction/addition of 2*pi.
inline double wrap_by_steps(double theta) {
  const double two_pi = 2.0 * M_PI;
  while (theta >= M_PI) theta -= two_pi;
  while (theta < -M_PI) theta += two_pi;
  return theta;
}

/// Reference FIFO of the last `capacity` items.
template <class T>
std::vector<T> last_n(const std::vector<T>& items, std::size_t capacity) {
  const std::size_t start = items.size() > capacity ? items.size() - capacity : 0;
  return std::vector<T>(items.begin() + static_cast<std::ptrdiff_t>(start), items.end());
}

/// Flood fill over a fine grid of free cells (clearance >= radius, evaluated
/// per cell centre by brute force over all walls). Returns true when every
/// spawn's cell is reachable from spawn 0.
inline bool spawns_connected(const multigen::WorldMap& map, double radius, double cell) {
  const auto b = map.bounds();
  const double pad = radius + 2 * cell;
  const int nx = static_cast<int>(std::ceil((b.width() + 2 * pad) / cell)) + 1;
  const int ny = static_cast<int>(std::ceil((b.height() + 2 * pad) / cell)) + 1;
  auto centre = [&](int x, int y) { return Vec2{b.min.x - pad + (x + 0.5) * cell, b.min.y - pad + (y + 0.5) * cell}; };
  std::vector<signed char> free_cell(static_cast<std::size_t>(nx) * ny, -1);
  auto is_free = [&](int x, int y) {
    auto& f = free_cell[static_cast<std::size_t>(y) * nx + x];
    if (f < 0) {
      const Vec2 c = centre(x, y);
      f = 1;
      for (std::size_t e = 0; e < map.edges.size(); ++e) {
        const auto [p, q] = map.segment(e);
        if (seg_dist(c, p, q) < radius) {
          f = 0;
          break;
        }
      }
    }
    return f == 1;
  };
  auto cell_of = [&](Vec2 p) -> std::optional<std::pair<int, int>> {
    const int cx = static_cast<int>(std::floor((p.x - (b.min.x - pad)) / cell));
    const int cy = static_cast<int>(std::floor((p.y - (b.min.y - pad)) / cell));
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (cx + dx >= 0 && cy + dy >= 0 && cx + dx < nx && cy + dy < ny && is_free(cx + dx, cy + dy))
          return std::pair{cx + dx, cy + dy};
    return std::nullopt;
  };
  const auto start = cell_of(map.spawns.at(0).position);
  if (!start) return false;
  std::vector<char> seen(static_cast<std::size_t>(nx) * ny, 0);
  std::deque<std::pair<int, int>> q{*start};
  seen[static_cast<std::size_t>(start->second) * nx + start->first] = 1;
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop_front();
    const int nbr[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
    for (auto& n : nbr) {
      if (n[0] < 0 || n[1] < 0 || n[0] >= nx || n[1] >= ny) continue;
      auto& s = seen[static_cast<std::size_t>(n[1]) * nx + n[0]];
      if (s || !is_free(n[0], n[1])) continue;
      s = 1;
      q.emplace_back(n[0], n[1]);
    }
  }
  for (const auto& sp : map.spawns) {
    const auto c = cell_of(sp.position);
    if (!c || !seen[static_cast<std::size_t>(c->second) * nx + c->first]) return false;
  }
  return true;
}

/// Proper segment crossing test (interiors intersect), excluding shared endpoints.
inline bool segments_cross_improperly(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
    const double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    return (v > 1e-12) - (v < -1e-12);
  };
  auto on_seg = [](Vec2 p, Vec2 q, Vec2 r) {
    return std::min(p.x, q.x) - 1e-12 <= r.x && r.x <= std::max(p.x, q.x) + 1e-12 && std::min(p.y, q.y) - 1e-12 <= r.y &&
           r.y <= std::max(p.y, q.y) + 1e-12;
  };
  const bool shares = a == c || a == d || b == c || b == d;
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  // Touching/collinear contacts other than a shared endpoint.
  auto touch = [&](int o, Vec2 p, Vec2 q, Vec2 r) { return o == 0 && on_seg(p, q, r) && !(r == p || r == q); };
  if (touch(o1, a, b, c) || touch(o2, a, b, d) || touch(o3, c, d, a) || touch(o4, c, d, b)) return true;
  if (shares && o1 == 0 && o2 == 0) {
    // Collinear with a shared endpoint: overlapping beyond the shared point?
    const Vec2 s = (a == c || a == d) ? a : b;
    const Vec2 u = s == a ? b : a;
    const Vec2 v = (s == c) ? d : c;
    return (u.x - s.x) * (v.x - s.x) + (u.y - s.y) * (v.y - s.y) > 0;
  }
  return false;
}

}  // namespace oracle
