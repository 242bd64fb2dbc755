#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "multigen/error.hpp"
#include "multigen/geometry.hpp"
#include "multigen/pose.hpp"
#include "multigen/world.hpp"

namespace multigen {

/// Composite discrete control for one tick.
struct Action {
  int move = 0;    // -1 backward, +1 forward
  int strafe = 0;  // -1 left, +1 right
  int turn = 0;    // +1 increases theta (left), -1 right
  bool attack = false;

  bool is_noop() const { return move == 0 && strafe == 0 && turn == 0 && !attack; }
  bool valid() const {
    auto unit = [](int v) { return v >= -1 && v <= 1; };
    return unit(move) && unit(strafe) && unit(turn);
  }
  bool operator==(const Action&) const = default;
};

inline void require_valid(const Action& a) {
  if (!a.valid()) throw WorldError("action component out of range");
}

struct MotionConfig {
  double move_speed = 0.35;         // world units per tick
  double strafe_speed = 0.3;        // world units per tick
  double turn_rate = kPi / 36.0;    // radians per tick
  double collision_radius = kDefaultCollisionRadius;
  double attack_range = 20.0;
  double attack_half_angle = kPi / 60.0;
  std::uint64_t respawn_delay = 60;  // ticks

  void validate(double fov = kDefaultFov) const {
    if (!(move_speed > 0 && strafe_speed > 0 && turn_rate > 0 && collision_radius > 0 && attack_range > 0 &&
          attack_half_angle > 0 && respawn_delay > 0)) {
      throw WorldError("motion config values must be strictly positive");
    }
    if (!(attack_half_angle < fov / 2.0)) throw WorldError("attack_half_angle must be below fov/2");
  }
  bool operator==(const MotionConfig&) const = default;
};

struct PoseDelta {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;
};

/// Turn first, then translate along the turned axes.
inline PoseDelta propose_delta(const Pose& pose, const Action& action, const MotionConfig& cfg) {
  PoseDelta d;
  d.dtheta = action.turn * cfg.turn_rate;
  if (action.move == 0 && action.strafe == 0) return d;
  const double heading = wrap_angle(pose.theta() + d.dtheta);
  const Vec2 forward = unit_from_angle(heading);
  const Vec2 right{forward.y, -forward.x};
  const Vec2 step = forward * (action.move * cfg.move_speed) + right * (action.strafe * cfg.strafe_speed);
  d.dx = step.x;
  d.dy = step.y;
  return d;
}

/// Sliding collision: the full step if it is clear, otherwise the x then y
/// components individually, each kept only if its position is clear.
/// Known anisotropy: the fixed x-then-y order favours x on diagonal contact.
inline Pose resolve_collision(const WorldMap& map, const Pose& pose, const PoseDelta& delta, const MotionConfig& cfg) {
  Pose out = pose;
  out.set_theta(pose.theta() + delta.dtheta);
  if (delta.dx == 0.0 && delta.dy == 0.0) return out;
  const double r = cfg.collision_radius;
  const Vec2 start = pose.position();
  const Vec2 full{start.x + delta.dx, start.y + delta.dy};
  if (is_clear(map, full, r)) {
    out.set_position(full);
    return out;
  }
  Vec2 at = start;
  if (delta.dx != 0.0) {
    const Vec2 x_step{at.x + delta.dx, at.y};
    if (is_clear(map, x_step, r)) at = x_step;
  }
  if (delta.dy != 0.0) {
    const Vec2 y_step{at.x, at.y + delta.dy};
    if (is_clear(map, y_step, r)) at = y_step;
  }
  out.set_position(at);
  return out;
}

/// Hitscan: nearest active opponent inside the attack cone and range with a
/// clear line of sight; ties go to the smaller id.
inline std::optional<PlayerId> resolve_attack(const WorldState& state, const PlayerId& attacker,
                                              const MotionConfig& cfg) {
  const PlayerState& shooter = state.player(attacker);
  if (!shooter.active()) throw WorldError("attacker " + attacker + " is not active");
  std::optional<PlayerId> best;
  double best_d = 0.0;
  for (const auto& [id, p] : state.players) {
    if (id == attacker || !p.active()) continue;
    if (!is_visible(*state.map, shooter.pose, p.pose.position(), 2.0 * cfg.attack_half_angle, cfg.attack_range)) {
      continue;
    }
    const double d = distance(shooter.pose.position(), p.pose.position());
    // Players iterate in ascending id order, so strict < keeps the smaller id on ties.
    if (!best || d < best_d) {
      best = id;
      best_d = d;
    }
  }
  return best;
}

enum class EventKind { moved, killed, respawned };

struct Event {
  EventKind kind = EventKind::moved;
  std::uint64_t tick = 0;  // tick of the state the event was produced from
  PlayerId player;         // mover, victim or respawned player
  PlayerId killer;         // killed only
  Pose from;               // moved only
  Pose to;                 // moved: new pose; respawned: spawn pose

  bool operator==(const Event&) const = default;
};

using ActionMap = std::map<PlayerId, Action>;

struct Advance {
  WorldState state;
  std::vector<Event> events;
};

/// One authoritative step: respawns, movement (ascending id), attacks
/// (ascending id, kills applied immediately), then tick += 1.
inline Advance advance_world(WorldState state, const ActionMap& actions, const MotionConfig& cfg) {
  for (const auto& [id, action] : actions) {
    if (!state.players.contains(id)) throw WorldError("action for unknown player " + id);
    require_valid(action);
  }
  Advance out;
  const std::uint64_t tick = state.tick;

  std::vector<PlayerId> respawned;
  state = process_respawns(std::move(state), &respawned);
  for (const auto& id : respawned) {
    Event e;
    e.kind = EventKind::respawned;
    e.tick = tick;
    e.player = id;
    e.to = state.players.at(id).pose;
    out.events.push_back(std::move(e));
  }

  static const Action kNoop{};
  auto action_of = [&](const PlayerId& id) -> const Action& {
    auto it = actions.find(id);
    return it == actions.end() ? kNoop : it->second;
  };

  for (auto& [id, p] : state.players) {
    if (!p.active()) continue;
    const Action& a = action_of(id);
    if (a.move == 0 && a.strafe == 0 && a.turn == 0) continue;
    const Pose before = p.pose;
    p.pose = resolve_collision(*state.map, before, propose_delta(before, a, cfg), cfg);
    if (p.pose != before) {
      Event e;
      e.kind = EventKind::moved;
      e.tick = tick;
      e.player = id;
      e.from = before;
      e.to = p.pose;
      out.events.push_back(std::move(e));
    }
  }

  std::vector<PlayerId> attackers;
  for (const auto& [id, p] : state.players) {
    if (action_of(id).attack) attackers.push_back(id);
  }
  for (const auto& id : attackers) {
    if (!state.players.at(id).active()) continue;  // killed earlier this tick
    if (auto victim = resolve_attack(state, id, cfg)) {
      state = kill_player(std::move(state), *victim, id, cfg.respawn_delay);
      Event e;
      e.kind = EventKind::killed;
      e.tick = tick;
      e.player = *victim;
      e.killer = id;
      out.events.push_back(std::move(e));
    }
  }

  state.tick += 1;
  out.state = std::move(state);
  return out;
}

struct Tally {
  std::uint64_t kills = 0;
  std::uint64_t deaths = 0;
  bool operator==(const Tally&) const = default;
};

/// Rebuilds per-player kill/death counters from an event log.
inline std::map<PlayerId, Tally> fold_events(const std::vector<Event>& events) {
  std::map<PlayerId, Tally> tally;
  for (const auto& e : events) {
    if (e.kind != EventKind::killed) continue;
    tally[e.player].deaths += 1;
    tally[e.killer].kills += 1;
  }
  return tally;
}

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::moved: return "moved";
    case EventKind::killed: return "killed";
    case EventKind::respawned: return "respawned";
  }
  return "unknown";
}

}  // namespace multigen
