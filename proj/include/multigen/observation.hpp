#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multigen/dynamics.hpp"
#include "multigen/error.hpp"
#include "multigen/frame.hpp"
#include "multigen/geometry.hpp"
#include "multigen/world.hpp"

namespace multigen {

inline constexpr double kWallWorldHeight = 1.0;
inline constexpr double kSpriteWorldHeight = 0.7;
inline constexpr double kSpriteWorldWidth = 0.5;
inline constexpr int kDefaultFrameWidth = 320;
inline constexpr int kDefaultFrameHeight = 200;

/// Viewpoint parameters shared by readouts and rendering.
struct ViewConfig {
  double fov = kDefaultFov;
  int columns = kDefaultColumns;
  double max_range = kDefaultMaxRange;
  int width = kDefaultFrameWidth;
  int height = kDefaultFrameHeight;
};

/// Focal length in pixels for an image `width` pixels wide.
inline double focal_length(int width, double fov) { return (width / 2.0) / std::tan(fov / 2.0); }

struct SpriteProjection {
  PlayerId player_id;
  double screen_column = 0.0;  // fractional column of the target centre
  double distance = 0.0;       // euclidean, world units
  double scale = 0.0;          // projected height in pixels at a frame `columns` wide
  bool operator==(const SpriteProjection&) const = default;
};

struct ViewpointReadout {
  Pose pose;
  DepthReadout depth;
  std::vector<SpriteProjection> sprites;
};

inline SpriteProjection project_sprite(const Pose& viewer, const PlayerId& id, Vec2 target, int columns, double fov) {
  const double bearing = relative_bearing(viewer, target);
  const double dist = distance(viewer.position(), target);
  const double perp = std::max(dist * std::cos(bearing), kMinDepth);
  return {id, bearing_to_column(bearing, columns, fov), dist, kSpriteWorldHeight * focal_length(columns, fov) / perp};
}

/// Depth sweep at the viewer's pose plus one sprite per visible opponent.
inline ViewpointReadout viewpoint_readout(const WorldState& state, const PlayerId& viewer, const ViewConfig& view) {
  const PlayerState& me = state.player(viewer);
  if (!me.active()) throw WorldError("viewer " + viewer + " is not active");
  ViewpointReadout out;
  out.pose = me.pose;
  out.depth = depth_readout(*state.map, me.pose, view.fov, view.columns, view.max_range);
  for (const auto& [id, p] : state.players) {
    if (id == viewer || !p.active()) continue;
    if (!is_visible(*state.map, me.pose, p.pose.position(), view.fov, view.max_range)) continue;
    out.sprites.push_back(project_sprite(me.pose, id, p.pose.position(), view.columns, view.fov));
  }
  return out;
}

/// Perpendicular (fisheye-free) disparity: distance * cos(offset) in the depth
/// domain, i.e. disparity / cos(offset). The centre column is unchanged.
inline std::vector<double> fisheye_correct(std::span<const double> disparity, double fov) {
  const int columns = static_cast<int>(disparity.size());
  std::vector<double> out(disparity.begin(), disparity.end());
  if (columns <= 1) return out;
  for (int j = 0; j < columns; ++j) out[static_cast<std::size_t>(j)] /= std::cos(column_offset(j, columns, fov));
  return out;
}

struct RenderStyle {
  bool draw_sprites = true;
  bool occlusion = true;  // 1D z-buffer test against walls
};

namespace detail {

// Depends on distance only, so a client holding just the disparity row shades identically.
inline std::uint8_t wall_shade(double perp, double max_range) {
  const double t = std::clamp(perp / max_range, 0.0, 1.0);
  return static_cast<std::uint8_t>(40 + std::lround(180.0 * (1.0 - t)));
}

/// Rows covered by a span centred at `top`..`bottom` in continuous pixel coordinates.
inline std::pair<int, int> pixel_rows(double top, double bottom, int height) {
  int y0 = static_cast<int>(std::ceil(top - 0.5));
  int y1 = static_cast<int>(std::ceil(bottom - 0.5));
  y0 = std::clamp(y0, 0, height);
  y1 = std::clamp(y1, 0, height);
  return {y0, y1};
}

}  // namespace detail

/// Reference 2.5D column renderer.
///
/// When the readout has K columns and the frame W, pixel column x samples
/// readout column floor(x * K / W). Wall slices use perpendicular distance;
/// sprites are solid billboards in the player's palette colour, drawn far to
/// near and clipped per column against the wall depth. Each billboard with an
/// unclipped column also gets a one-pixel marker two rows above its top, at
/// the unclipped column nearest its centre.
inline Frame render_frame(const DepthReadout& readout, std::span<const SpriteProjection> sprites, int width,
                          int height, const RenderStyle& style = {}) {
  if (width <= 0 || height <= 0) throw Error("render_frame: width and height must be positive");
  const int columns = readout.columns();
  if (columns < 1) throw Error("render_frame: empty readout");

  Frame frame(width, height, kFloorColor);
  const int horizon = height / 2;
  for (int y = 0; y < horizon; ++y) {
    for (int x = 0; x < width; ++x) frame.set(x, y, kCeilingColor);
  }

  const double focal = focal_length(width, readout.fov);
  const double mid = height / 2.0;
  std::vector<double> zbuffer(static_cast<std::size_t>(width), std::numeric_limits<double>::infinity());

  for (int x = 0; x < width; ++x) {
    const int j = static_cast<int>(static_cast<long long>(x) * columns / width);
    const Hit& hit = readout.hits[static_cast<std::size_t>(j)];
    if (!hit.edge) continue;
    const double perp = std::max(hit.distance * std::cos(column_offset(j, columns, readout.fov)), kMinDepth);
    zbuffer[static_cast<std::size_t>(x)] = perp;
    const double h = kWallWorldHeight * focal / perp;
    const auto [y0, y1] = detail::pixel_rows(mid - h / 2.0, mid + h / 2.0, height);
    const std::uint8_t v = detail::wall_shade(perp, readout.max_range);
    for (int y = y0; y < y1; ++y) frame.set(x, y, {v, v, v});
  }

  if (!style.draw_sprites) return frame;

  std::vector<const SpriteProjection*> order;
  for (const auto& s : sprites) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(), [](const SpriteProjection* a, const SpriteProjection* b) {
    if (a->distance != b->distance) return a->distance > b->distance;
    return a->player_id < b->player_id;
  });

  struct Pip {
    int x;
    int y;
    Rgb color;
  };
  std::vector<Pip> pips;
  const double column_scale = static_cast<double>(width) / columns;
  for (const SpriteProjection* s : order) {
    const double bearing = readout.fov * (0.5 - s->screen_column / columns);
    const double perp = std::max(s->distance * std::cos(bearing), kMinDepth);
    const double sprite_h = s->scale * column_scale;
    const double sprite_w = sprite_h * (kSpriteWorldWidth / kSpriteWorldHeight);
    const double cx = s->screen_column * column_scale;
    const int x0 = static_cast<int>(std::floor(cx - sprite_w / 2.0));
    const int x1 = static_cast<int>(std::floor(cx + sprite_w / 2.0));
    const double floor_y = mid + (kWallWorldHeight / 2.0) * focal / perp;
    auto [y0, y1] = detail::pixel_rows(floor_y - sprite_h, floor_y, height);
    if (y1 <= y0) {
      // Always cover at least one row so a distant sprite is never lost.
      y0 = std::clamp(static_cast<int>(std::floor(floor_y - sprite_h / 2.0)), 0, height - 1);
      y1 = y0 + 1;
    }
    const Rgb color = player_color(s->player_id);
    std::optional<int> pip_x;
    for (int x = std::max(x0, 0); x <= std::min(x1, width - 1); ++x) {
      if (style.occlusion && !(perp < zbuffer[static_cast<std::size_t>(x)])) continue;
      for (int y = y0; y < y1; ++y) frame.set(x, y, color);
      if (!pip_x || std::abs(x + 0.5 - cx) < std::abs(*pip_x + 0.5 - cx)) pip_x = x;
    }
    if (pip_x) pips.push_back({*pip_x, std::max(y0 - 2, 0), color});
  }
  // Marker pips go on last so a billboard hidden behind a nearer one still shows.
  for (const auto& pip : pips) frame.set(pip.x, pip.y, pip.color);
  return frame;
}

/// Ring of the L most recent frames for one viewpoint, oldest first.
class ObservationContext {
 public:
  ObservationContext(std::size_t capacity, int width, int height) : capacity_(capacity), width_(width), height_(height) {
    if (capacity == 0) throw Error("context capacity must be positive");
  }

  void push(Frame frame) {
    if (frame.width() != width_ || frame.height() != height_) throw Error("context frame dimension mismatch");
    if (frames_.size() == capacity_) frames_.pop_front();
    frames_.push_back(std::move(frame));
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return frames_.size(); }
  const std::deque<Frame>& frames() const { return frames_; }
  int width() const { return width_; }
  int height() const { return height_; }

 private:
  std::size_t capacity_;
  int width_;
  int height_;
  std::deque<Frame> frames_;
};

inline ObservationContext push_context(ObservationContext ctx, Frame frame) {
  ctx.push(std::move(frame));
  return ctx;
}

/// Observation backend: (context, readout, action) -> next frame.
///
/// condition() produces the viewpoint conditioning from the shared state;
/// observe() turns it into pixels. A learned renderer replaces observe().
class ObservationBackend {
 public:
  virtual ~ObservationBackend() = default;
  virtual std::string_view name() const = 0;

  virtual ViewpointReadout condition(const WorldState& state, const PlayerId& viewer, const ViewConfig& view) const {
    return viewpoint_readout(state, viewer, view);
  }

  virtual Frame observe(const ObservationContext& context, const ViewpointReadout& readout, const Action& action,
                        const ViewConfig& view) const = 0;
};

/// Deterministic raycaster; ignores context and action.
class ReferenceBackend : public ObservationBackend {
 public:
  std::string_view name() const override { return "reference"; }
  Frame observe(const ObservationContext&, const ViewpointReadout& readout, const Action&,
                const ViewConfig& view) const override {
    return render_frame(readout.depth, readout.sprites, view.width, view.height);
  }
};

/// Degraded backend that never draws opponents.
class NoSpritesBackend : public ObservationBackend {
 public:
  std::string_view name() const override { return "no-sprites"; }
  Frame observe(const ObservationContext&, const ViewpointReadout& readout, const Action&,
                const ViewConfig& view) const override {
    return render_frame(readout.depth, readout.sprites, view.width, view.height, RenderStyle{false, true});
  }
};

/// Degraded backend that draws every opponent in range and field of view,
/// ignoring walls.
class NoOcclusionBackend : public ObservationBackend {
 public:
  std::string_view name() const override { return "no-occlusion"; }

  ViewpointReadout condition(const WorldState& state, const PlayerId& viewer, const ViewConfig& view) const override {
    const PlayerState& me = state.player(viewer);
    if (!me.active()) throw WorldError("viewer " + viewer + " is not active");
    ViewpointReadout out;
    out.pose = me.pose;
    out.depth = depth_readout(*state.map, me.pose, view.fov, view.columns, view.max_range);
    for (const auto& [id, p] : state.players) {
      if (id == viewer || !p.active()) continue;
      const double d = distance(me.pose.position(), p.pose.position());
      if (d > view.max_range || d == 0.0) continue;
      if (std::abs(relative_bearing(me.pose, p.pose.position())) > view.fov / 2.0) continue;
      out.sprites.push_back(project_sprite(me.pose, id, p.pose.position(), view.columns, view.fov));
    }
    return out;
  }

  Frame observe(const ObservationContext&, const ViewpointReadout& readout, const Action&,
                const ViewConfig& view) const override {
    return render_frame(readout.depth, readout.sprites, view.width, view.height, RenderStyle{true, false});
  }
};

inline std::unique_ptr<ObservationBackend> make_backend(std::string_view name) {
  if (name == "reference") return std::make_unique<ReferenceBackend>();
  if (name == "no-sprites") return std::make_unique<NoSpritesBackend>();
  if (name == "no-occlusion") return std::make_unique<NoOcclusionBackend>();
  throw Error("unknown backend " + std::string(name));
}

}  // namespace multigen
