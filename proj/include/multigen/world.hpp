#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "multigen/error.hpp"
#include "multigen/format.hpp"
#include "multigen/geometry.hpp"
#include "multigen/hash.hpp"
#include "multigen/map_validation.hpp"
#include "multigen/pose.hpp"
#include "multigen/rng.hpp"
#include "multigen/world_map.hpp"

namespace multigen {

/// Opaque player identifier. Player order everywhere is std::string order.
using PlayerId = std::string;

enum class PlayerStatus { active, dead };

struct PlayerState {
  PlayerId id;
  Pose pose;
  PlayerStatus status = PlayerStatus::active;
  std::uint64_t respawn_tick = 0;  // meaningful only while dead
  std::uint64_t kills = 0;
  std::uint64_t deaths = 0;

  bool active() const { return status == PlayerStatus::active; }
  bool operator==(const PlayerState&) const = default;
};

/// The shared external memory: static map plus the evolving player set.
///
/// WorldState is a value. Every operation below takes a state and returns the
/// successor; the map is shared (immutable) between all copies.
struct WorldState {
  std::shared_ptr<const WorldMap> map;
  std::uint64_t tick = 0;
  std::map<PlayerId, PlayerState> players;
  SplitMix64 rng;
  double collision_radius = kDefaultCollisionRadius;

  // Least-recently-used spawn rotation: stamp of the last use of each spawn.
  std::vector<std::uint64_t> spawn_stamps;
  std::uint64_t spawn_sequence = 0;

  // Counters of players who have left, so world-wide kill/death totals survive departures.
  std::uint64_t retired_kills = 0;
  std::uint64_t retired_deaths = 0;

  const PlayerState& player(const PlayerId& id) const {
    auto it = players.find(id);
    if (it == players.end()) throw WorldError("unknown player " + id);
    return it->second;
  }

  bool operator==(const WorldState& o) const {
    return *map == *o.map && tick == o.tick && players == o.players && rng == o.rng &&
           collision_radius == o.collision_radius && spawn_stamps == o.spawn_stamps &&
           spawn_sequence == o.spawn_sequence && retired_kills == o.retired_kills &&
           retired_deaths == o.retired_deaths;
  }
};

/// Frozen, shareable view of a state.
using Snapshot = std::shared_ptr<const WorldState>;

inline Snapshot snapshot(const WorldState& state) { return std::make_shared<const WorldState>(state); }

inline WorldState new_world(WorldMap map, std::uint64_t seed, double collision_radius = kDefaultCollisionRadius) {
  ValidationReport report = validate_map(map, collision_radius);
  if (!report.ok()) throw MapValidationError(std::move(report));
  WorldState state;
  state.spawn_stamps.assign(map.spawns.size(), 0);
  state.map = std::make_shared<const WorldMap>(std::move(map));
  state.rng = SplitMix64(seed);
  state.collision_radius = collision_radius;
  return state;
}

namespace detail {

inline bool spawn_blocked(const WorldState& state, std::size_t spawn, const PlayerId& ignore) {
  const Vec2 at = state.map->spawns[spawn].position;
  for (const auto& [id, p] : state.players) {
    if (id == ignore || !p.active()) continue;
    if (distance(p.pose.position(), at) < 2.0 * state.collision_radius) return true;
  }
  return false;
}

/// Least-recently-used unblocked spawn, ties by index.
inline std::optional<std::size_t> pick_spawn(const WorldState& state, const PlayerId& who) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < state.map->spawns.size(); ++i) {
    if (spawn_blocked(state, i, who)) continue;
    if (!best || state.spawn_stamps[i] < state.spawn_stamps[*best]) best = i;
  }
  return best;
}

inline Pose use_spawn(WorldState& state, std::size_t spawn) {
  state.spawn_stamps[spawn] = ++state.spawn_sequence;
  const SpawnPoint& sp = state.map->spawns[spawn];
  return Pose(sp.position, sp.yaw);
}

}  // namespace detail

inline WorldState add_player(WorldState state, const PlayerId& id) {
  if (id.empty()) throw WorldError("player id must not be empty");
  if (state.players.contains(id)) throw WorldError("duplicate player id " + id);
  const auto spawn = detail::pick_spawn(state, id);
  if (!spawn) throw WorldError("spawn blocked");
  PlayerState p;
  p.id = id;
  p.pose = detail::use_spawn(state, *spawn);
  state.players.emplace(id, std::move(p));
  return state;
}

/// Removes a departing player, keeping their counters in the world totals.
inline WorldState remove_player(WorldState state, const PlayerId& id) {
  auto it = state.players.find(id);
  if (it == state.players.end()) throw WorldError("unknown player " + id);
  state.retired_kills += it->second.kills;
  state.retired_deaths += it->second.deaths;
  state.players.erase(it);
  return state;
}

inline WorldState kill_player(WorldState state, const PlayerId& victim, const PlayerId& killer,
                              std::uint64_t respawn_delay) {
  if (respawn_delay == 0) throw WorldError("respawn delay must be positive");
  auto v = state.players.find(victim);
  if (v == state.players.end()) throw WorldError("unknown player " + victim);
  auto k = state.players.find(killer);
  if (k == state.players.end()) throw WorldError("unknown player " + killer);
  if (!v->second.active()) throw WorldError("player " + victim + " is not active");
  v->second.status = PlayerStatus::dead;
  v->second.respawn_tick = state.tick + respawn_delay;
  v->second.deaths += 1;
  k->second.kills += 1;  // self-kill credits the same player
  return state;
}

/// Reactivates every dead player whose respawn tick has come. A respawn whose
/// spawns are all blocked waits for a later tick. Respawned ids are appended
/// to `respawned` in ascending id order.
inline WorldState process_respawns(WorldState state, std::vector<PlayerId>* respawned = nullptr) {
  for (auto& [id, p] : state.players) {
    if (p.active() || p.respawn_tick > state.tick) continue;
    const auto spawn = detail::pick_spawn(state, id);
    if (!spawn) continue;
    p.pose = detail::use_spawn(state, *spawn);
    p.status = PlayerStatus::active;
    p.respawn_tick = 0;
    if (respawned) respawned->push_back(id);
  }
  return state;
}

inline std::uint64_t total_kills(const WorldState& s) {
  std::uint64_t n = s.retired_kills;
  for (const auto& [id, p] : s.players) n += p.kills;
  return n;
}

inline std::uint64_t total_deaths(const WorldState& s) {
  std::uint64_t n = s.retired_deaths;
  for (const auto& [id, p] : s.players) n += p.deaths;
  return n;
}

/// Value quantized to 1e-6 units, as used by the canonical hash.
inline std::int64_t quantize_micro(double v) { return static_cast<std::int64_t>(std::llround(v * 1e6)); }

/// 64-bit FNV-1a digest over the tick, the players (ascending id, poses
/// quantized to 1e-6), the spawn rotation, retired counters and the RNG state.
inline std::uint64_t canonical_hash(const WorldState& state) {
  Fnv1a64 h;
  h.str("multigen-world/1");
  h.u64(state.tick);
  h.u64(state.players.size());
  for (const auto& [id, p] : state.players) {
    h.str(id);
    h.i64(quantize_micro(p.pose.x()));
    h.i64(quantize_micro(p.pose.y()));
    h.i64(quantize_micro(p.pose.theta()));
    h.u64(p.active() ? 0 : 1);
    h.u64(p.respawn_tick);
    h.u64(p.kills);
    h.u64(p.deaths);
  }
  h.u64(state.spawn_stamps.size());
  for (auto s : state.spawn_stamps) h.u64(s);
  h.u64(state.spawn_sequence);
  h.u64(state.retired_kills);
  h.u64(state.retired_deaths);
  h.u64(state.rng.state());
  return h.digest();
}

/// Deterministic text document for the dynamic part of a state: sorted keys,
/// nine significant digits. Equal documents mean canonically equal states.
inline std::string canonical_text(const WorldState& state) {
  std::string out = "{\"map\":" + nlohmann::json(state.map->name).dump() + ",\"players\":[";
  bool first = true;
  for (const auto& [id, p] : state.players) {
    if (!first) out += ',';
    first = false;
    out += "{\"deaths\":" + std::to_string(p.deaths) + ",\"id\":" + nlohmann::json(id).dump() +
           ",\"kills\":" + std::to_string(p.kills) + ",\"pose\":{\"theta\":" + format_sig9(p.pose.theta()) +
           ",\"x\":" + format_sig9(p.pose.x()) + ",\"y\":" + format_sig9(p.pose.y()) + "}";
    if (p.active()) {
      out += ",\"status\":\"active\"}";
    } else {
      out += ",\"respawn_tick\":" + std::to_string(p.respawn_tick) + ",\"status\":\"dead\"}";
    }
  }
  out += "],\"retired_deaths\":" + std::to_string(state.retired_deaths) +
         ",\"retired_kills\":" + std::to_string(state.retired_kills) + ",\"rng_state\":\"" +
         to_hex(state.rng.state()) + "\",\"spawn_sequence\":" + std::to_string(state.spawn_sequence) +
         ",\"spawn_stamps\":[";
  for (std::size_t i = 0; i < state.spawn_stamps.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(state.spawn_stamps[i]);
  }
  out += "],\"tick\":" + std::to_string(state.tick) + "}";
  return out;
}

}  // namespace multigen
