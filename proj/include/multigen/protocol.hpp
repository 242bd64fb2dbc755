#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "multigen/dynamics.hpp"
#include "multigen/format.hpp"
#include "multigen/hash.hpp"
#include "multigen/map_io.hpp"
#include "multigen/observation.hpp"
#include "multigen/replay.hpp"

namespace multigen {

inline constexpr std::string_view kProtocolVersion = "multigen/1";

/// A protocol violation; `code` is sent back in the error message.
class ProtocolError : public Error {
 public:
  ProtocolError(std::string code, const std::string& detail) : Error(detail), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct JoinRequest {
  std::string name;
};

struct ActionMessage {
  std::uint64_t tick = 0;
  Action action;
};

struct ByeMessage {};

using ClientMessage = std::variant<JoinRequest, ActionMessage, ByeMessage>;

namespace detail {

inline nlohmann::json parse_versioned(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError("malformed", std::string("unparseable message: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("malformed", "message must be an object");
  if (!j.contains("v") || !j["v"].is_string() || j["v"].get<std::string>() != kProtocolVersion) {
    throw ProtocolError("version", "expected protocol version " + std::string(kProtocolVersion));
  }
  if (!j.contains("type") || !j["type"].is_string()) throw ProtocolError("malformed", "missing type");
  return j;
}

inline int action_component(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return 0;
  const auto& v = j[key];
  if (!v.is_number_integer()) throw ProtocolError("bad_action", std::string(key) + " must be an integer");
  const int i = v.get<int>();
  if (i < -1 || i > 1) throw ProtocolError("bad_action", std::string(key) + " out of range");
  return i;
}

}  // namespace detail

inline ClientMessage parse_client_message(std::string_view line) {
  const nlohmann::json j = detail::parse_versioned(line);
  const std::string type = j["type"].get<std::string>();
  if (type == "join") {
    JoinRequest r;
    if (j.contains("name")) {
      if (!j["name"].is_string()) throw ProtocolError("malformed", "name must be a string");
      r.name = j["name"].get<std::string>();
    }
    return r;
  }
  if (type == "action") {
    ActionMessage m;
    if (j.contains("tick")) {
      if (!j["tick"].is_number_unsigned()) throw ProtocolError("bad_action", "tick must be a non-negative integer");
      m.tick = j["tick"].get<std::uint64_t>();
    }
    m.action.move = detail::action_component(j, "move");
    m.action.strafe = detail::action_component(j, "strafe");
    m.action.turn = detail::action_component(j, "turn");
    if (j.contains("attack")) {
      if (j["attack"].is_boolean()) m.action.attack = j["attack"].get<bool>();
      else if (j["attack"].is_number_integer()) m.action.attack = j["attack"].get<int>() != 0;
      else throw ProtocolError("bad_action", "attack must be a boolean");
    }
    return m;
  }
  if (type == "bye") return ByeMessage{};
  throw ProtocolError("unknown_type", "unknown message type " + type);
}

/// Parses any server message (used by clients and tests); checks the version.
inline nlohmann::json parse_server_message(std::string_view line) { return detail::parse_versioned(line); }

inline std::string encode_join(std::string_view name) {
  return nlohmann::json{{"v", kProtocolVersion}, {"type", "join"}, {"name", name}}.dump();
}

inline std::string encode_action(std::uint64_t tick, const Action& a) {
  return nlohmann::json{{"v", kProtocolVersion}, {"type", "action"}, {"tick", tick}, {"move", a.move},
                        {"strafe", a.strafe},   {"turn", a.turn},     {"attack", a.attack}}
      .dump();
}

inline std::string encode_bye() { return nlohmann::json{{"v", kProtocolVersion}, {"type", "bye"}}.dump(); }

inline std::string encode_error(std::string_view code, std::string_view detail) {
  return nlohmann::json{{"v", kProtocolVersion}, {"type", "error"}, {"code", code}, {"detail", detail}}.dump();
}

inline std::string encode_joined(const PlayerId& id, double tick_rate, const WorldMap& map, const MotionConfig& motion,
                                 std::uint64_t tick) {
  return nlohmann::json{{"v", kProtocolVersion}, {"type", "joined"},  {"player_id", id},
                        {"tick_rate", tick_rate}, {"map", map_to_json(map)}, {"motion", motion_to_json(motion)},
                        {"tick", tick}}
      .dump();
}

inline std::string base64_encode(std::string_view data) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < data.size(); i += 3) {
    const std::uint32_t n = (static_cast<std::uint8_t>(data[i]) << 16) | (static_cast<std::uint8_t>(data[i + 1]) << 8) |
                            static_cast<std::uint8_t>(data[i + 2]);
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += kAlphabet[n & 63];
  }
  if (i < data.size()) {
    std::uint32_t n = static_cast<std::uint8_t>(data[i]) << 16;
    if (i + 1 < data.size()) n |= static_cast<std::uint8_t>(data[i + 1]) << 8;
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += i + 1 < data.size() ? kAlphabet[(n >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

inline std::string base64_decode(std::string_view text) {
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::string out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=') break;
    const int v = value(c);
    if (v < 0) throw ParseError("base64: invalid character");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out += static_cast<char>((acc >> bits) & 0xff);
    }
  }
  return out;
}

/// Per-player payload of one tick.
struct TickUpdate {
  std::uint64_t tick = 0;
  std::uint64_t snapshot_hash = 0;
  std::string status = "active";  // active | dead | pending
  std::optional<Pose> pose;
  std::optional<std::uint64_t> respawn_tick;
  std::vector<double> disparity;
  std::vector<SpriteProjection> sprites;
  std::vector<Event> events;
  std::optional<std::string> frame_ppm;  // server-side render mode only
};

namespace detail {

inline void append_pose(std::string& out, const Pose& p) {
  out += "{\"x\":";
  append_fixed(out, p.x(), 6);
  out += ",\"y\":";
  append_fixed(out, p.y(), 6);
  out += ",\"theta\":";
  append_fixed(out, p.theta(), 6);
  out += '}';
}

}  // namespace detail

/// Hand-rolled encoder: disparities and sprite fields carry exactly six
/// fractional digits. Moved events stay server-side.
inline std::string encode_tick(const TickUpdate& u) {
  std::string out;
  out.reserve(64 + u.disparity.size() * 10);
  out += "{\"v\":\"";
  out += kProtocolVersion;
  out += "\",\"type\":\"tick\",\"tick\":" + std::to_string(u.tick) + ",\"snapshot_hash\":\"" +
         to_hex(u.snapshot_hash) + "\",\"status\":\"" + u.status + "\"";
  if (u.pose) {
    out += ",\"pose\":";
    detail::append_pose(out, *u.pose);
  }
  if (u.respawn_tick) out += ",\"respawn_tick\":" + std::to_string(*u.respawn_tick);
  out += ",\"disparity\":[";
  for (std::size_t i = 0; i < u.disparity.size(); ++i) {
    if (i) out += ',';
    append_fixed(out, u.disparity[i], 6);
  }
  out += "],\"sprites\":[";
  for (std::size_t i = 0; i < u.sprites.size(); ++i) {
    const auto& s = u.sprites[i];
    if (i) out += ',';
    out += "{\"player_id\":" + nlohmann::json(s.player_id).dump() + ",\"screen_column\":";
    append_fixed(out, s.screen_column, 6);
    out += ",\"distance\":";
    append_fixed(out, s.distance, 6);
    out += ",\"scale\":";
    append_fixed(out, s.scale, 6);
    out += '}';
  }
  out += "],\"events\":[";
  bool first = true;
  for (const auto& e : u.events) {
    if (e.kind == EventKind::moved) continue;
    if (!first) out += ',';
    first = false;
    if (e.kind == EventKind::killed) {
      out += "{\"kind\":\"killed\",\"tick\":" + std::to_string(e.tick) + ",\"victim\":" +
             nlohmann::json(e.player).dump() + ",\"killer\":" + nlohmann::json(e.killer).dump() + "}";
    } else {
      out += "{\"kind\":\"respawned\",\"tick\":" + std::to_string(e.tick) + ",\"player_id\":" +
             nlohmann::json(e.player).dump() + ",\"pose\":";
      detail::append_pose(out, e.to);
      out += '}';
    }
  }
  out += ']';
  if (u.frame_ppm) out += ",\"frame_ppm\":\"" + base64_encode(*u.frame_ppm) + "\"";
  out += '}';
  return out;
}

namespace detail {

inline Pose pose_from_json(const nlohmann::json& j) {
  return Pose(j.at("x").get<double>(), j.at("y").get<double>(), j.at("theta").get<double>());
}

}  // namespace detail

/// Client-side decoder for a tick message.
inline TickUpdate decode_tick(std::string_view line) {
  const nlohmann::json j = detail::parse_versioned(line);
  if (j["type"] != "tick") throw ProtocolError("malformed", "expected a tick message");
  TickUpdate u;
  try {
    u.tick = j.at("tick").get<std::uint64_t>();
    const auto hash = from_hex(j.at("snapshot_hash").get<std::string>());
    if (!hash) throw ProtocolError("malformed", "bad snapshot_hash");
    u.snapshot_hash = *hash;
    u.status = j.at("status").get<std::string>();
    if (j.contains("pose")) u.pose = detail::pose_from_json(j["pose"]);
    if (j.contains("respawn_tick")) u.respawn_tick = j["respawn_tick"].get<std::uint64_t>();
    u.disparity = j.at("disparity").get<std::vector<double>>();
    for (const auto& s : j.at("sprites")) {
      u.sprites.push_back({s.at("player_id").get<std::string>(), s.at("screen_column").get<double>(),
                           s.at("distance").get<double>(), s.at("scale").get<double>()});
    }
    for (const auto& e : j.at("events")) {
      Event ev;
      ev.tick = e.at("tick").get<std::uint64_t>();
      const std::string kind = e.at("kind").get<std::string>();
      if (kind == "killed") {
        ev.kind = EventKind::killed;
        ev.player = e.at("victim").get<std::string>();
        ev.killer = e.at("killer").get<std::string>();
      } else if (kind == "respawned") {
        ev.kind = EventKind::respawned;
        ev.player = e.at("player_id").get<std::string>();
        ev.to = detail::pose_from_json(e.at("pose"));
      } else {
        throw ProtocolError("malformed", "unknown event kind " + kind);
      }
      u.events.push_back(std::move(ev));
    }
    if (j.contains("frame_ppm")) u.frame_ppm = base64_decode(j["frame_ppm"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError("malformed", std::string("tick message: ") + e.what());
  }
  return u;
}

/// Rebuilds a depth readout from a wire disparity row. A column at or below
/// 1 / max_range is a miss; any other column is a wall at 1 / disparity.
inline DepthReadout readout_from_disparity(std::span<const double> disparity, double fov = kDefaultFov,
                                           double max_range = kDefaultMaxRange) {
  DepthReadout r;
  r.fov = fov;
  r.max_range = max_range;
  r.disparity.assign(disparity.begin(), disparity.end());
  for (double d : disparity) {
    if (d > 1.0 / max_range) {
      r.hits.push_back({1.0 / d, std::size_t{0}, {}});
    } else {
      r.hits.push_back({max_range, std::nullopt, {}});
    }
  }
  return r;
}

/// What a client draws for one tick message: the reference renderer fed
/// only from wire data.
inline Frame render_tick_update(const TickUpdate& u, int width = kDefaultFrameWidth, int height = kDefaultFrameHeight,
                                double fov = kDefaultFov, double max_range = kDefaultMaxRange) {
  return render_frame(readout_from_disparity(u.disparity, fov, max_range), u.sprites, width, height);
}

/// Colour document shared with clients: fixed colours plus the player
/// palette in slot order, and the rule assigning ids to slots.
inline nlohmann::json palette_document() {
  auto rgb = [](Rgb c) { return nlohmann::json::array({c.r, c.g, c.b}); };
  nlohmann::json players = nlohmann::json::array();
  for (const Rgb& c : kPlayerPalette) players.push_back(rgb(c));
  return {{"v", kProtocolVersion},
          {"ceiling", rgb(kCeilingColor)},
          {"floor", rgb(kFloorColor)},
          {"minimap_background", rgb(kMinimapBackground)},
          {"minimap_wall", rgb(kMinimapWall)},
          {"players", std::move(players)},
          {"slot_rule", "pN -> (N - 1) mod size; other ids -> fnv1a64(id) mod size"},
          {"wall_shade", "grey 40 + round(180 * (1 - clamp(perp / max_range, 0, 1)))"}};
}

}  // namespace multigen
