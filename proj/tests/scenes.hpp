#pragma once

// Reference render scenes with frozen PPM goldens under tests/golden, plus
// the tick messages a client receives for them.

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "multigen/multigen.hpp"

namespace scenes {

struct Scene {
  std::string name;
  multigen::WorldMap map;
  std::vector<std::pair<multigen::PlayerId, multigen::Pose>> players;  // first entry is the viewer
};

inline std::vector<Scene> golden_scenes() {
  using multigen::kPi;
  using multigen::Pose;
  multigen::WorldMap open_field;
  open_field.name = "open";
  open_field.spawns = {{{0, 0}, 0.0}};
  return {
      {"empty", open_field, {{"p1", Pose(0, 0, 0)}}},
      {"frontal_wall", fixtures::square_room(5), {{"p1", Pose(0, 0, 0)}}},
      {"corner", fixtures::square_room(5), {{"p1", Pose(0, 0, kPi / 4)}}},
      {"visible_sprite", fixtures::wall_between(), {{"p1", Pose(-5, 4, 0)}, {"p2", Pose(5, 4, kPi)}}},
      {"occluded_sprite", fixtures::wall_between(), {{"p1", Pose(-5, 0, 0)}, {"p2", Pose(5, 0, kPi)}}},
  };
}

inline multigen::WorldState scene_state(const Scene& scene) {
  multigen::WorldState s;
  s.map = std::make_shared<const multigen::WorldMap>(scene.map);
  for (const auto& [id, pose] : scene.players) {
    multigen::PlayerState p;
    p.id = id;
    p.pose = pose;
    s.players.emplace(id, p);
  }
  return s;
}

/// Renders the scene from the first player's viewpoint with the default 320x200 view.
inline multigen::Frame render_scene(const Scene& scene) {
  const multigen::ViewConfig view;
  const auto readout = multigen::viewpoint_readout(scene_state(scene), scene.players.front().first, view);
  return multigen::render_frame(readout.depth, readout.sprites, view.width, view.height);
}

/// The tick message the viewer would receive for this scene.
inline multigen::TickUpdate scene_tick(const Scene& scene, std::uint64_t tick) {
  const multigen::WorldState s = scene_state(scene);
  auto r = multigen::viewpoint_readout(s, scene.players.front().first, multigen::ViewConfig{});
  multigen::TickUpdate u;
  u.tick = tick;
  u.snapshot_hash = multigen::canonical_hash(s);
  u.pose = scene.players.front().second;
  u.disparity = std::move(r.depth.disparity);
  u.sprites = std::move(r.sprites);
  return u;
}

inline std::string golden_path(const std::string& dir, const Scene& scene) {
  return (std::filesystem::path(dir) / (scene.name + ".ppm")).string();
}

/// True when goldens should be (re)written instead of compared.
inline bool update_goldens() {
  const char* v = std::getenv("MULTIGEN_UPDATE_GOLDEN");
  return v != nullptr && std::string(v) == "1";
}

}  // namespace scenes
