#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "multigen/error.hpp"
#include "multigen/format.hpp"
#include "multigen/map_validation.hpp"
#include "multigen/world_map.hpp"

namespace multigen {

inline constexpr std::string_view kMapFormatVersion = "multigen-map/1";

/// Map document as a JSON object (used when a map is embedded in another document).
inline nlohmann::json map_to_json(const WorldMap& map) {
  nlohmann::json j;
  j["version"] = kMapFormatVersion;
  j["name"] = map.name;
  j["vertices"] = nlohmann::json::array();
  for (Vec2 v : map.vertices) j["vertices"].push_back({v.x, v.y});
  j["edges"] = nlohmann::json::array();
  for (Edge e : map.edges) j["edges"].push_back({e.a, e.b});
  j["spawns"] = nlohmann::json::array();
  for (const auto& s : map.spawns) j["spawns"].push_back({{"x", s.position.x}, {"y", s.position.y}, {"theta", s.yaw}});
  return j;
}

/// Canonical, human-editable text form of a map. Numbers carry at most
/// nine significant digits; one vertex, edge or spawn per line.
inline std::string save_map_string(const WorldMap& map) {
  std::string out;
  out += "{\n";
  out += "  \"version\": \"" + std::string(kMapFormatVersion) + "\",\n";
  out += "  \"name\": " + nlohmann::json(map.name).dump() + ",\n";
  out += "  \"vertices\": [";
  for (std::size_t i = 0; i < map.vertices.size(); ++i) {
    out += i ? ",\n    [" : "\n    [";
    out += format_sig9(map.vertices[i].x) + ", " + format_sig9(map.vertices[i].y) + "]";
  }
  out += map.vertices.empty() ? "],\n" : "\n  ],\n";
  out += "  \"edges\": [";
  for (std::size_t i = 0; i < map.edges.size(); ++i) {
    out += i ? ",\n    [" : "\n    [";
    out += std::to_string(map.edges[i].a) + ", " + std::to_string(map.edges[i].b) + "]";
  }
  out += map.edges.empty() ? "],\n" : "\n  ],\n";
  out += "  \"spawns\": [";
  for (std::size_t i = 0; i < map.spawns.size(); ++i) {
    const auto& s = map.spawns[i];
    out += i ? ",\n    " : "\n    ";
    out += "{\"x\": " + format_sig9(s.position.x) + ", \"y\": " + format_sig9(s.position.y) +
           ", \"theta\": " + format_sig9(s.yaw) + "}";
  }
  out += map.spawns.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

namespace detail {

inline double map_number(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number()) throw ParseError("field " + field + ": expected a number");
  return j.get<double>();
}

inline std::size_t map_index(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ParseError("field " + field + ": expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

inline void require_keys(const nlohmann::json& j, std::initializer_list<std::string_view> keys,
                         const std::string& where) {
  if (!j.is_object()) throw ParseError("field " + where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
      throw ParseError("field " + where + (where.empty() ? "" : ".") + it.key() + ": unknown field");
    }
  }
  for (auto key : keys) {
    if (!j.contains(key)) throw ParseError("field " + where + (where.empty() ? "" : ".") + std::string(key) + ": missing");
  }
}

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

}  // namespace detail

/// Strict-schema decode of a map object. Does not check map invariants.
inline WorldMap map_from_json(const nlohmann::json& j) {
  detail::require_keys(j, {"version", "name", "vertices", "edges", "spawns"}, "");
  if (!j["version"].is_string() || j["version"].get<std::string>() != kMapFormatVersion) {
    throw ParseError("field version: expected \"" + std::string(kMapFormatVersion) + "\"");
  }
  if (!j["name"].is_string()) throw ParseError("field name: expected a string");
  WorldMap map;
  map.name = j["name"].get<std::string>();

  const auto& verts = j["vertices"];
  if (!verts.is_array()) throw ParseError("field vertices: expected an array");
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const std::string where = "vertices[" + std::to_string(i) + "]";
    if (!verts[i].is_array() || verts[i].size() != 2) throw ParseError("field " + where + ": expected [x, y]");
    map.vertices.push_back({detail::map_number(verts[i][0], where), detail::map_number(verts[i][1], where)});
  }

  const auto& edges = j["edges"];
  if (!edges.is_array()) throw ParseError("field edges: expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    if (!edges[i].is_array() || edges[i].size() != 2) throw ParseError("field " + where + ": expected [u, w]");
    map.edges.push_back({detail::map_index(edges[i][0], where), detail::map_index(edges[i][1], where)});
  }

  const auto& spawns = j["spawns"];
  if (!spawns.is_array()) throw ParseError("field spawns: expected an array");
  for (std::size_t i = 0; i < spawns.size(); ++i) {
    const std::string where = "spawns[" + std::to_string(i) + "]";
    detail::require_keys(spawns[i], {"x", "y", "theta"}, where);
    map.spawns.push_back({{detail::map_number(spawns[i]["x"], where + ".x"), detail::map_number(spawns[i]["y"], where + ".y")},
                          detail::map_number(spawns[i]["theta"], where + ".theta")});
  }
  return map;
}

/// Parses a map document without checking map invariants.
inline WorldMap parse_map_string(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("line " + std::to_string(detail::line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " +
                     e.what());
  }
  return map_from_json(j);
}

/// Parses and validates; throws MapValidationError carrying the report.
inline WorldMap load_map_string(std::string_view text, double collision_radius = kDefaultCollisionRadius) {
  WorldMap map = parse_map_string(text);
  ValidationReport report = validate_map(map, collision_radius);
  if (!report.ok()) throw MapValidationError(std::move(report));
  return map;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed for " + path);
}

inline WorldMap load_map(const std::string& path, double collision_radius = kDefaultCollisionRadius) {
  return load_map_string(read_text_file(path), collision_radius);
}

inline void save_map(const std::string& path, const WorldMap& map) { write_text_file(path, save_map_string(map)); }

/// Round-trip through the text form so a map carries exactly the values a
/// saved file would; used wherever a map must be reproducible from its file.
inline WorldMap canonicalize_map(const WorldMap& map) { return parse_map_string(save_map_string(map)); }

}  // namespace multigen
