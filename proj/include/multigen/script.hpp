#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "multigen/dynamics.hpp"
#include "multigen/error.hpp"

namespace multigen {

/// Per-tick scripted actions: one "tick player move strafe turn attack"
/// line per entry. Blank lines and '#' comments are ignored.
struct ActionScript {
  std::map<std::uint64_t, ActionMap> ticks;
  std::set<PlayerId> players;

  /// Number of ticks the script spans (last scripted tick + 1).
  std::uint64_t length() const { return ticks.empty() ? 0 : ticks.rbegin()->first + 1; }

  const ActionMap& at(std::uint64_t tick) const {
    static const ActionMap kEmpty;
    auto it = ticks.find(tick);
    return it == ticks.end() ? kEmpty : it->second;
  }
};

inline ActionScript parse_action_script(std::istream& in) {
  ActionScript script;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    auto fail = [&](const std::string& what) {
      throw ParseError("action script line " + std::to_string(line_no) + ": " + what);
    };
    std::uint64_t tick = 0;
    try {
      std::size_t used = 0;
      if (first.starts_with('-')) fail("tick must be a non-negative integer");
      tick = std::stoull(first, &used);
      if (used != first.size()) fail("tick must be a non-negative integer");
    } catch (const std::logic_error&) {
      fail("tick must be a non-negative integer");
    }
    PlayerId player;
    int move = 0, strafe = 0, turn = 0, attack = 0;
    if (!(fields >> player >> move >> strafe >> turn >> attack)) fail("expected: tick player move strafe turn attack");
    std::string extra;
    if (fields >> extra) fail("unexpected trailing field '" + extra + "'");
    const Action action{move, strafe, turn, attack != 0};
    if (!action.valid() || attack < 0 || attack > 1) fail("action component out of range");
    if (!script.ticks[tick].emplace(player, action).second) fail("duplicate action for " + player + " at tick " + first);
    script.players.insert(player);
  }
  return script;
}

inline ActionScript parse_action_script_string(const std::string& text) {
  std::istringstream in(text);
  return parse_action_script(in);
}

}  // namespace multigen
