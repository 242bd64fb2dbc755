#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "multigen/dynamics.hpp"
#include "multigen/error.hpp"
#include "multigen/hash.hpp"
#include "multigen/map_io.hpp"
#include "multigen/world.hpp"

namespace multigen {

inline constexpr std::string_view kReplayFormatVersion = "multigen-replay/1";
inline constexpr std::uint64_t kCheckpointInterval = 100;

/// Everything applied during one advance: departures, arrivals, actions.
struct TickInput {
  std::uint64_t tick = 0;  // tick of the state the input is applied to
  std::vector<PlayerId> leaves;
  std::vector<PlayerId> joins;
  ActionMap actions;
  bool operator==(const TickInput&) const = default;
};

/// Leaves, then joins (each in the listed order), then advance_world.
inline Advance apply_tick(WorldState state, const TickInput& input, const MotionConfig& cfg) {
  if (input.tick != state.tick) {
    throw WorldError("tick input for " + std::to_string(input.tick) + " applied at " + std::to_string(state.tick));
  }
  for (const auto& id : input.leaves) state = remove_player(std::move(state), id);
  for (const auto& id : input.joins) state = add_player(std::move(state), id);
  return advance_world(std::move(state), input.actions, cfg);
}

inline nlohmann::json motion_to_json(const MotionConfig& m) {
  return {{"move_speed", m.move_speed},
          {"strafe_speed", m.strafe_speed},
          {"turn_rate", m.turn_rate},
          {"collision_radius", m.collision_radius},
          {"attack_range", m.attack_range},
          {"attack_half_angle", m.attack_half_angle},
          {"respawn_delay", m.respawn_delay}};
}

/// Partial documents override only the fields they name.
inline MotionConfig motion_from_json(const nlohmann::json& j, MotionConfig base = {}) {
  if (!j.is_object()) throw ParseError("motion: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "respawn_delay") {
      if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
        throw ParseError("motion.respawn_delay: expected a non-negative integer");
      }
      base.respawn_delay = it->get<std::uint64_t>();
      continue;
    }
    if (!it->is_number()) throw ParseError("motion." + k + ": expected a number");
    const double v = it->get<double>();
    if (k == "move_speed") base.move_speed = v;
    else if (k == "strafe_speed") base.strafe_speed = v;
    else if (k == "turn_rate") base.turn_rate = v;
    else if (k == "collision_radius") base.collision_radius = v;
    else if (k == "attack_range") base.attack_range = v;
    else if (k == "attack_half_angle") base.attack_half_angle = v;
    else throw ParseError("motion." + k + ": unknown field");
  }
  return base;
}

inline nlohmann::json action_to_json(const Action& a) { return {a.move, a.strafe, a.turn, a.attack ? 1 : 0}; }

inline Action action_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw ParseError("action: expected [move, strafe, turn, attack]");
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ParseError("action: components must be integers");
  }
  Action a{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>() != 0};
  if (!a.valid() || j[3].get<int>() < 0 || j[3].get<int>() > 1) throw ParseError("action: component out of range");
  return a;
}

/// A recorded session: header (map, seed, motion), per-tick inputs,
/// checkpoint hashes and the final hash.
struct ReplayLog {
  WorldMap map;
  std::uint64_t seed = 0;
  MotionConfig motion;
  std::vector<TickInput> ticks;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> checkpoints;  // (tick, hash)
  std::uint64_t final_tick = 0;
  std::uint64_t final_hash = 0;
};

/// Streams a replay log as newline-delimited JSON documents.
class ReplayRecorder {
 public:
  ReplayRecorder(std::ostream& out, const WorldMap& map, std::uint64_t seed, const MotionConfig& motion) : out_(out) {
    nlohmann::json header{{"type", "header"},
                          {"v", kReplayFormatVersion},
                          {"map", map_to_json(map)},
                          {"seed", seed},
                          {"motion", motion_to_json(motion)}};
    out_ << header.dump() << '\n';
  }

  /// Records the input applied to reach `after`, plus a checkpoint when due.
  void record(const TickInput& input, const WorldState& after) {
    nlohmann::json line{{"type", "tick"}, {"tick", input.tick}};
    if (!input.leaves.empty()) line["leave"] = input.leaves;
    if (!input.joins.empty()) line["join"] = input.joins;
    nlohmann::json actions = nlohmann::json::object();
    for (const auto& [id, a] : input.actions) {
      if (!a.is_noop()) actions[id] = action_to_json(a);
    }
    line["actions"] = std::move(actions);
    out_ << line.dump() << '\n';
    if (after.tick % kCheckpointInterval == 0) {
      out_ << nlohmann::json{{"type", "checkpoint"}, {"tick", after.tick}, {"hash", to_hex(canonical_hash(after))}}.dump()
           << '\n';
    }
  }

  void finish(const WorldState& final_state) {
    out_ << nlohmann::json{{"type", "trailer"},
                           {"tick", final_state.tick},
                           {"final_hash", to_hex(canonical_hash(final_state))}}
                .dump()
         << '\n';
    out_.flush();
  }

 private:
  std::ostream& out_;
};

class ReplayFormatError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Raised when a replayed hash differs from the recorded one. The first
/// divergent tick lies in (last_good_tick, checkpoint_tick].
class DivergenceError : public Error {
 public:
  DivergenceError(std::uint64_t checkpoint_tick, std::uint64_t last_good_tick, std::uint64_t expected,
                  std::uint64_t actual)
      : Error("replay diverged: hash mismatch at tick " + std::to_string(checkpoint_tick) + " (expected " +
              to_hex(expected) + ", got " + to_hex(actual) + "); first divergent tick in (" +
              std::to_string(last_good_tick) + ", " + std::to_string(checkpoint_tick) + "]"),
        checkpoint_tick_(checkpoint_tick),
        last_good_tick_(last_good_tick) {}

  std::uint64_t checkpoint_tick() const { return checkpoint_tick_; }
  std::uint64_t last_good_tick() const { return last_good_tick_; }

 private:
  std::uint64_t checkpoint_tick_;
  std::uint64_t last_good_tick_;
};

inline ReplayLog parse_replay(std::istream& in) {
  ReplayLog log;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  bool have_trailer = false;
  auto fail = [&](const std::string& what) { throw ReplayFormatError("replay line " + std::to_string(line_no) + ": " + what); };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (have_trailer) fail("content after trailer");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    }
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) fail("missing type");
    const std::string type = j["type"].get<std::string>();
    try {
      if (!have_header) {
        if (type != "header") fail("first document must be the header");
        if (j.value("v", "") != kReplayFormatVersion) fail("unsupported replay version");
        log.map = map_from_json(j.at("map"));
        log.seed = j.at("seed").get<std::uint64_t>();
        log.motion = motion_from_json(j.at("motion"));
        have_header = true;
      } else if (type == "tick") {
        TickInput t;
        t.tick = j.at("tick").get<std::uint64_t>();
        const std::uint64_t expected = log.ticks.empty() ? 0 : log.ticks.back().tick + 1;
        if (t.tick != expected) {
          fail("tick gap: expected tick " + std::to_string(expected) + ", found " + std::to_string(t.tick));
        }
        if (j.contains("leave")) t.leaves = j["leave"].get<std::vector<PlayerId>>();
        if (j.contains("join")) t.joins = j["join"].get<std::vector<PlayerId>>();
        if (j.contains("actions")) {
          if (!j["actions"].is_object()) fail("actions must be an object");
          for (auto it = j["actions"].begin(); it != j["actions"].end(); ++it) t.actions[it.key()] = action_from_json(*it);
        }
        log.ticks.push_back(std::move(t));
      } else if (type == "checkpoint") {
        const auto h = from_hex(j.at("hash").get<std::string>());
        if (!h) fail("bad checkpoint hash");
        log.checkpoints.emplace_back(j.at("tick").get<std::uint64_t>(), *h);
      } else if (type == "trailer") {
        const auto h = from_hex(j.at("final_hash").get<std::string>());
        if (!h) fail("bad final hash");
        log.final_tick = j.at("tick").get<std::uint64_t>();
        log.final_hash = *h;
        have_trailer = true;
      } else {
        fail("unknown document type " + type);
      }
    } catch (const ReplayFormatError&) {
      throw;
    } catch (const Error& e) {
      fail(e.what());
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    }
  }
  if (!have_header) throw ReplayFormatError("replay: missing header");
  if (!have_trailer) throw ReplayFormatError("replay: missing trailer");
  if (log.final_tick != log.ticks.size()) {
    throw ReplayFormatError("replay: trailer tick " + std::to_string(log.final_tick) + " does not follow " +
                            std::to_string(log.ticks.size()) + " recorded ticks");
  }
  return log;
}

inline ReplayLog parse_replay_string(const std::string& text) {
  std::istringstream in(text);
  return parse_replay(in);
}

inline ReplayLog load_replay(const std::string& path) { return parse_replay_string(read_text_file(path)); }

/// Observer invoked with every post-advance state and the tick's events.
using ReplayObserver = std::function<void(const WorldState&, const std::vector<Event>&)>;

struct ReplayOutcome {
  WorldState final_state;
  std::uint64_t final_hash = 0;
  std::vector<Event> events;
};

/// Re-runs the logged inputs headlessly and verifies checkpoint and final hashes.
inline ReplayOutcome replay_from_log(const ReplayLog& log, const ReplayObserver& observer = {}) {
  WorldState state = new_world(log.map, log.seed, log.motion.collision_radius);
  std::map<std::uint64_t, std::uint64_t> checkpoints(log.checkpoints.begin(), log.checkpoints.end());
  std::uint64_t last_good = 0;
  ReplayOutcome out;
  for (const auto& input : log.ticks) {
    Advance step = apply_tick(std::move(state), input, log.motion);
    state = std::move(step.state);
    if (observer) observer(state, step.events);
    out.events.insert(out.events.end(), step.events.begin(), step.events.end());
    if (auto it = checkpoints.find(state.tick); it != checkpoints.end()) {
      const std::uint64_t h = canonical_hash(state);
      if (h != it->second) throw DivergenceError(state.tick, last_good, it->second, h);
      last_good = state.tick;
    }
  }
  out.final_hash = canonical_hash(state);
  if (out.final_hash != log.final_hash) throw DivergenceError(state.tick, last_good, log.final_hash, out.final_hash);
  out.final_state = std::move(state);
  return out;
}

}  // namespace multigen
