#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "multigen/dynamics.hpp"
#include "multigen/map_io.hpp"
#include "multigen/observation.hpp"
#include "multigen/protocol.hpp"
#include "multigen/replay.hpp"
#include "multigen/world.hpp"

namespace multigen {

enum class RenderMode { readout, frames };

struct SessionOptions {
  MotionConfig motion;
  ViewConfig view;
  double tick_rate = 20.0;
  std::size_t max_players = 8;
  RenderMode render_mode = RenderMode::readout;
  bool parallel_readouts = false;  // fan phase-3 readouts out over std::async
};

struct JoinResult {
  std::optional<PlayerId> id;
  std::string error_code;  // "full" when rejected
};

struct TickOutput {
  std::uint64_t tick = 0;
  std::uint64_t snapshot_hash = 0;
  Snapshot snapshot;
  TickInput input;
  std::vector<Event> events;
  std::map<PlayerId, TickUpdate> updates;
  std::map<PlayerId, std::string> messages;  // encoded tick_update per connected player
};

/// Authoritative world host without any transport.
///
/// join/leave/submit may be called from any thread; they only touch the
/// inbox. step() is the single writer and must be called from one thread.
class Session {
 public:
  Session(WorldMap map, std::uint64_t seed, SessionOptions options, std::ostream* replay_sink = nullptr)
      : options_(std::move(options)),
        state_(new_world(canonicalize_map(map), seed, options_.motion.collision_radius)) {
    options_.motion.validate(options_.view.fov);
    if (options_.max_players < 1) throw Error("max_players must be at least 1");
    if (!(options_.tick_rate > 0.0)) throw Error("tick_rate must be positive");
    published_ = snapshot(state_);
    if (replay_sink) recorder_.emplace(*replay_sink, *state_.map, seed, options_.motion);
  }

  const SessionOptions& options() const { return options_; }
  const WorldMap& map() const { return *state_.map; }

  JoinResult join() {
    std::lock_guard lock(inbox_mu_);
    if (roster_.size() >= options_.max_players) return {std::nullopt, "full"};
    PlayerId id = "p" + std::to_string(++next_id_);
    roster_.insert(id);
    pending_joins_.push_back(id);
    return {id, {}};
  }

  void leave(const PlayerId& id) {
    std::lock_guard lock(inbox_mu_);
    if (roster_.erase(id) == 0) return;
    auto it = std::find(pending_joins_.begin(), pending_joins_.end(), id);
    if (it != pending_joins_.end()) {
      pending_joins_.erase(it);
    } else {
      pending_leaves_.push_back(id);
    }
    actions_.erase(id);
  }

  /// Latest action before the next step wins.
  void submit(const PlayerId& id, const Action& action) {
    require_valid(action);
    std::lock_guard lock(inbox_mu_);
    if (roster_.contains(id)) actions_[id] = action;
  }

  std::size_t connected() const {
    std::lock_guard lock(inbox_mu_);
    return roster_.size();
  }

  std::string joined_message(const PlayerId& id) const {
    return encode_joined(id, options_.tick_rate, *state_.map, options_.motion, published_tick_.load());
  }

  /// Latest post-advance snapshot.
  Snapshot current() const {
    std::lock_guard lock(publish_mu_);
    return published_;
  }

  std::uint64_t tick() const { return published_tick_.load(); }

  /// Phases 2-4 of a tick: exclusive advance, readouts from the frozen
  /// snapshot, per-player messages.
  TickOutput step() {
    TickInput input;
    input.tick = state_.tick;
    std::vector<PlayerId> joins;
    std::set<PlayerId> roster;
    {
      std::lock_guard lock(inbox_mu_);
      input.leaves = std::exchange(pending_leaves_, {});
      joins = std::exchange(pending_joins_, {});
      input.actions = std::exchange(actions_, {});
      roster = roster_;
    }

    // Trial-apply leaves and joins; joins whose spawns are blocked wait.
    WorldState trial = state_;
    for (const auto& id : input.leaves) trial = remove_player(std::move(trial), id);
    std::vector<PlayerId> deferred;
    for (const auto& id : joins) {
      try {
        trial = add_player(std::move(trial), id);
        input.joins.push_back(id);
      } catch (const WorldError&) {
        deferred.push_back(id);
      }
    }
    if (!deferred.empty()) {
      std::lock_guard lock(inbox_mu_);
      pending_joins_.insert(pending_joins_.begin(), deferred.begin(), deferred.end());
    }
    std::erase_if(input.actions, [&](const auto& kv) { return !trial.players.contains(kv.first); });

    Advance adv = apply_tick(std::move(state_), input, options_.motion);
    state_ = std::move(adv.state);
    if (recorder_) recorder_->record(input, state_);

    TickOutput out;
    out.tick = state_.tick;
    out.snapshot_hash = canonical_hash(state_);
    out.snapshot = snapshot(state_);
    out.input = std::move(input);
    out.events = std::move(adv.events);
    {
      std::lock_guard lock(publish_mu_);
      published_ = out.snapshot;
    }
    published_tick_.store(out.tick);

    build_updates(out, roster);
    return out;
  }

  /// Writes the replay trailer; further steps are not recorded.
  void finish() {
    if (recorder_) {
      recorder_->finish(state_);
      recorder_.reset();
    }
  }

 private:
  TickUpdate update_for(const WorldState& snap, const PlayerId& id, std::uint64_t hash,
                        const std::vector<Event>& events) const {
    TickUpdate u;
    u.tick = snap.tick;
    u.snapshot_hash = hash;
    u.events = events;
    auto it = snap.players.find(id);
    if (it == snap.players.end()) {
      u.status = "pending";
      return u;
    }
    u.pose = it->second.pose;
    if (!it->second.active()) {
      u.status = "dead";
      u.respawn_tick = it->second.respawn_tick;
      return u;
    }
    ViewpointReadout r = viewpoint_readout(snap, id, options_.view);
    u.disparity = std::move(r.depth.disparity);
    u.sprites = std::move(r.sprites);
    if (options_.render_mode == RenderMode::frames) {
      // Render from the rounded wire values so the frame is exactly what a client draws from this message.
      const TickUpdate wire = decode_tick(encode_tick(u));
      u.frame_ppm = encode_ppm(render_tick_update(wire, options_.view.width, options_.view.height, options_.view.fov,
                                                  options_.view.max_range));
    }
    return u;
  }

  void build_updates(TickOutput& out, const std::set<PlayerId>& roster) const {
    const WorldState& snap = *out.snapshot;
    std::vector<PlayerId> ids(roster.begin(), roster.end());
    std::vector<TickUpdate> updates(ids.size());
    if (options_.parallel_readouts && ids.size() > 1) {
      std::vector<std::future<TickUpdate>> jobs;
      for (const auto& id : ids) {
        jobs.push_back(std::async(std::launch::async, [&, id] { return update_for(snap, id, out.snapshot_hash, out.events); }));
      }
      for (std::size_t i = 0; i < ids.size(); ++i) updates[i] = jobs[i].get();
    } else {
      for (std::size_t i = 0; i < ids.size(); ++i) updates[i] = update_for(snap, ids[i], out.snapshot_hash, out.events);
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      out.messages.emplace(ids[i], encode_tick(updates[i]));
      out.updates.emplace(ids[i], std::move(updates[i]));
    }
  }

  SessionOptions options_;
  WorldState state_;
  std::optional<ReplayRecorder> recorder_;

  mutable std::mutex inbox_mu_;
  std::set<PlayerId> roster_;
  std::vector<PlayerId> pending_joins_;
  std::vector<PlayerId> pending_leaves_;
  ActionMap actions_;
  std::uint64_t next_id_ = 0;

  mutable std::mutex publish_mu_;
  Snapshot published_;
  std::atomic<std::uint64_t> published_tick_{0};
};

}  // namespace multigen
