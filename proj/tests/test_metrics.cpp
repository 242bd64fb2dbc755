#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "multigen/multigen.hpp"

using namespace multigen;

namespace {

// Idle session of `ticks` ticks with `players` joiners, returned as a parsed log.
ReplayLog idle_log(const WorldMap& map, int players, int ticks) {
  std::ostringstream out;
  Session s(map, 1, SessionOptions{}, &out);
  for (int i = 0; i < players; ++i) s.join();
  for (int t = 0; t < ticks; ++t) s.step();
  s.finish();
  return parse_replay_string(out.str());
}

PresenceLabelStream stream(const std::vector<bool>& values) {
  PresenceLabelStream out;
  for (std::size_t i = 0; i < values.size(); ++i) out[{i, "p1", "p2"}] = values[i];
  return out;
}

}  // namespace

TEST(GroundTruth, SinglePlayerIsEmpty) {
  EXPECT_TRUE(ground_truth_labels(idle_log(fixtures::wall_between(), 1, 5)).empty());
}

TEST(GroundTruth, FacingInEmptyRoom) {
  const WorldMap m = fixtures::square_room(6, {{{-3, 0}, 0.0}, {{3, 0}, kPi}});
  const auto labels = ground_truth_labels(idle_log(m, 2, 3));
  ASSERT_EQ(labels.size(), 6u);
  for (const auto& [k, v] : labels) EXPECT_TRUE(v) << k.tick << " " << k.viewer;
}

TEST(GroundTruth, WallBetweenBothHidden) {
  const auto labels = ground_truth_labels(idle_log(fixtures::wall_between(), 2, 3));
  ASSERT_EQ(labels.size(), 6u);
  for (const auto& [k, v] : labels) EXPECT_FALSE(v);
}

TEST(Detector, Fixtures) {
  Frame plain(8, 8, kFloorColor);
  EXPECT_FALSE(frame_presence_detector(plain, player_color("p2")));
  plain.set(3, 3, player_color("p2"));
  EXPECT_TRUE(frame_presence_detector(plain, player_color("p2")));
  EXPECT_FALSE(frame_presence_detector(plain, player_color("p3")));
  // Near miss colour is not a detection.
  Frame near(2, 2, {254, 0, 0});
  EXPECT_FALSE(frame_presence_detector(near, player_color("p1")));
}

TEST(PresenceScore, SelfAgreement) {
  const auto s = stream({true, false, true, true});
  const PresenceScore score = presence_score(s, s);
  EXPECT_EQ(*score.accuracy(), 1.0);
}

TEST(PresenceScore, AllFalsePrediction) {
  const PresenceScore score = presence_score(stream({false, false, false}), stream({true, false, true}));
  EXPECT_EQ(*score.recall(), 0.0);
  EXPECT_FALSE(score.precision().has_value());
}

TEST(PresenceScore, HandCountedFixture) {
  //            tp    tp    tp    fp    tn     tn     tn     fn
  const auto predicted = stream({true, true, true, true, false, false, false, false});
  const auto truth = stream({true, true, true, false, false, false, false, true});
  const PresenceScore s = presence_score(predicted, truth);
  EXPECT_EQ(s.tp, 3u);
  EXPECT_EQ(s.fp, 1u);
  EXPECT_EQ(s.tn, 3u);
  EXPECT_EQ(s.fn, 1u);
  EXPECT_DOUBLE_EQ(*s.accuracy(), 0.75);
  EXPECT_DOUBLE_EQ(*s.precision(), 0.75);
  EXPECT_DOUBLE_EQ(*s.recall(), 0.75);
}

TEST(PresenceScore, MismatchedKeysRejected) {
  EXPECT_THROW(presence_score(stream({true}), stream({true, false})), Error);
  PresenceLabelStream other;
  other[{0, "p2", "p1"}] = true;
  EXPECT_THROW(presence_score(stream({true}), other), Error);
}

TEST(PresenceScore, InvariantToRelabelling) {
  PresenceLabelStream a, b, a2, b2;
  a[{0, "p1", "p2"}] = true;
  a[{1, "p2", "p1"}] = false;
  b[{0, "p1", "p2"}] = false;
  b[{1, "p2", "p1"}] = false;
  // Swap player names and reorder ticks.
  a2[{5, "p1", "p2"}] = false;
  a2[{9, "p2", "p1"}] = true;
  b2[{5, "p1", "p2"}] = false;
  b2[{9, "p2", "p1"}] = false;
  const auto s1 = presence_score(a, b);
  const auto s2 = presence_score(a2, b2);
  EXPECT_EQ(s1.tp, s2.tp);
  EXPECT_EQ(s1.fp, s2.fp);
  EXPECT_EQ(s1.tn, s2.tn);
  EXPECT_EQ(s1.fn, s2.fn);
}

TEST(EvaluateRollout, ReferenceIsExact) {
  LevelSpec spec;
  spec.seed = 2;
  spec.room_count = 3;
  std::ostringstream out;
  Session s(generate_map(spec), 3, SessionOptions{}, &out);
  for (int i = 0; i < 3; ++i) s.join();
  SplitMix64 rng(1);
  for (int t = 0; t < 200; ++t) {
    for (const char* id : {"p1", "p2", "p3"}) {
      s.submit(id, Action{1, static_cast<int>(rng.below(3)) - 1, static_cast<int>(rng.below(3)) - 1, rng.below(10) == 0});
    }
    s.step();
  }
  s.finish();
  const ReplayLog log = parse_replay_string(out.str());
  const auto ev = evaluate_rollout(log, ReferenceBackend{});
  EXPECT_GT(ev.score.total(), 0u);
  EXPECT_EQ(*ev.score.accuracy(), 1.0) << presence_report(ev);
}

TEST(EvaluateRollout, DegradedBackendsOnWallBetween) {
  WorldMap m = fixtures::wall_between();
  // Two spawns in the open strip and two behind the wall.
  const ReplayLog log = idle_log(m, 2, 10);
  const auto none = evaluate_rollout(log, NoSpritesBackend{});
  const auto blind = evaluate_rollout(log, NoOcclusionBackend{});
  EXPECT_EQ(none.score.tp + none.score.fp, 0u);
  ASSERT_TRUE(blind.score.precision().has_value());
  EXPECT_LT(*blind.score.precision(), 1.0);
  EXPECT_EQ(blind.score.fp, 20u);  // both directions on every tick

  m.spawns = {{{-5, 4}, 0.0}, {{5, 4}, kPi}};
  const ReplayLog open = idle_log(m, 2, 10);
  const auto none_open = evaluate_rollout(open, NoSpritesBackend{});
  EXPECT_EQ(*none_open.score.recall(), 0.0);
  EXPECT_EQ(*evaluate_rollout(open, ReferenceBackend{}).score.accuracy(), 1.0);
}

TEST(PresenceReport, ListsCountsAndDisagreements) {
  const ReplayLog log = idle_log(fixtures::wall_between(), 2, 2);
  const std::string report = presence_report(evaluate_rollout(log, NoOcclusionBackend{}));
  EXPECT_NE(report.find("backend: no-occlusion"), std::string::npos);
  EXPECT_NE(report.find("precision: 0.000000"), std::string::npos) << report;
  EXPECT_NE(report.find("recall: absent"), std::string::npos);
  EXPECT_NE(report.find("tick 1 p1 -> p2: predicted visible, truth hidden"), std::string::npos) << report;
}

TEST(ActionScript, ParsesAndRejects) {
  const ActionScript s = parse_action_script_string("# header\n0 p1 1 0 0 0\n\n3 p2 0 -1 1 1  # fire\n");
  EXPECT_EQ(s.length(), 4u);
  EXPECT_EQ(s.at(3).at("p2"), (Action{0, -1, 1, true}));
  EXPECT_TRUE(s.at(1).empty());
  EXPECT_EQ(s.players.size(), 2u);
  EXPECT_THROW(parse_action_script_string("0 p1 2 0 0 0\n"), ParseError);
  EXPECT_THROW(parse_action_script_string("0 p1 1 0 0\n"), ParseError);
  EXPECT_THROW(parse_action_script_string("x p1 1 0 0 0\n"), ParseError);
  EXPECT_THROW(parse_action_script_string("0 p1 1 0 0 0\n0 p1 0 0 0 0\n"), ParseError);
  try {
    parse_action_script_string("0 p1 1 0 0 0\n1 p1 1 0 0 0 extra\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}
