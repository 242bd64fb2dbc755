#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "multigen/format.hpp"
#include "multigen/observation.hpp"
#include "multigen/replay.hpp"

namespace multigen {

struct PresenceKey {
  std::uint64_t tick = 0;
  PlayerId viewer;
  PlayerId opponent;
  auto operator<=>(const PresenceKey&) const = default;
};

/// visible(tick, viewer, opponent), defined where both players are active.
using PresenceLabelStream = std::map<PresenceKey, bool>;

/// Geometric ground truth: is_visible on every post-advance state of a replay.
inline PresenceLabelStream ground_truth_labels(const ReplayLog& log, const ViewConfig& view = {}) {
  PresenceLabelStream labels;
  replay_from_log(log, [&](const WorldState& s, const std::vector<Event>&) {
    for (const auto& [vid, viewer] : s.players) {
      if (!viewer.active()) continue;
      for (const auto& [oid, opp] : s.players) {
        if (oid == vid || !opp.active()) continue;
        labels[{s.tick, vid, oid}] = is_visible(*s.map, viewer.pose, opp.pose.position(), view.fov, view.max_range);
      }
    }
  });
  return labels;
}

/// True iff any pixel equals the opponent's palette colour exactly.
inline bool frame_presence_detector(const Frame& frame, Rgb opponent_color) {
  const auto& px = frame.pixels();
  for (std::size_t i = 0; i < px.size(); i += 3) {
    if (px[i] == opponent_color.r && px[i + 1] == opponent_color.g && px[i + 2] == opponent_color.b) return true;
  }
  return false;
}

struct PresenceScore {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  std::optional<double> accuracy() const {
    if (total() == 0) return std::nullopt;
    return static_cast<double>(tp + tn) / static_cast<double>(total());
  }
  std::optional<double> precision() const {
    if (tp + fp == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  std::optional<double> recall() const {
    if (tp + fn == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
};

/// Positive = opponent visible. Key sets must match.
inline PresenceScore presence_score(const PresenceLabelStream& predicted, const PresenceLabelStream& truth) {
  if (predicted.size() != truth.size()) throw Error("presence_score: label streams have different key sets");
  PresenceScore s;
  auto p = predicted.begin();
  for (auto t = truth.begin(); t != truth.end(); ++t, ++p) {
    if (!(p->first == t->first)) throw Error("presence_score: label streams have different key sets");
    if (p->second && t->second) ++s.tp;
    else if (p->second) ++s.fp;
    else if (t->second) ++s.fn;
    else ++s.tn;
  }
  return s;
}

struct PresenceEvaluation {
  PresenceScore score;
  PresenceLabelStream predicted;
  PresenceLabelStream truth;
  std::string backend;
};

/// Replays the log, renders each active viewer with `backend`, detects each
/// active opponent's colour and scores against the geometric labels.
inline PresenceEvaluation evaluate_rollout(const ReplayLog& log, const ObservationBackend& backend,
                                           const ViewConfig& view = {}) {
  PresenceEvaluation ev;
  ev.backend = std::string(backend.name());
  ev.truth = ground_truth_labels(log, view);
  std::map<PlayerId, ObservationContext> contexts;
  replay_from_log(log, [&](const WorldState& s, const std::vector<Event>&) {
    for (const auto& [vid, viewer] : s.players) {
      if (!viewer.active()) continue;
      auto ctx = contexts.try_emplace(vid, 4, view.width, view.height).first;
      const ViewpointReadout r = backend.condition(s, vid, view);
      Frame frame = backend.observe(ctx->second, r, Action{}, view);
      for (const auto& [oid, opp] : s.players) {
        if (oid == vid || !opp.active()) continue;
        ev.predicted[{s.tick, vid, oid}] = frame_presence_detector(frame, player_color(oid));
      }
      ctx->second.push(std::move(frame));
    }
  });
  ev.score = presence_score(ev.predicted, ev.truth);
  return ev;
}

inline std::string presence_report(const PresenceEvaluation& ev) {
  auto ratio = [](std::optional<double> v) { return v ? format_fixed(*v, 6) : std::string("absent"); };
  std::ostringstream out;
  out << "backend: " << ev.backend << '\n';
  out << "labels: " << ev.score.total() << '\n';
  out << "tp: " << ev.score.tp << "\nfp: " << ev.score.fp << "\ntn: " << ev.score.tn << "\nfn: " << ev.score.fn << '\n';
  out << "accuracy: " << ratio(ev.score.accuracy()) << '\n';
  out << "precision: " << ratio(ev.score.precision()) << '\n';
  out << "recall: " << ratio(ev.score.recall()) << '\n';
  out << "disagreements:\n";
  for (const auto& [key, truth] : ev.truth) {
    const bool pred = ev.predicted.at(key);
    if (pred != truth) {
      out << "  tick " << key.tick << ' ' << key.viewer << " -> " << key.opponent << ": predicted "
          << (pred ? "visible" : "hidden") << ", truth " << (truth ? "visible" : "hidden") << '\n';
    }
  }
  return out.str();
}

}  // namespace multigen
