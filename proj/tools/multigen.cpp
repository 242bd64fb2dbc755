// multigen: command-line entry point.
//
// Exit codes: 0 success, 1 usage error, 2 validation or divergence failure.

#include <csignal>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "multigen/multigen.hpp"
#include "multigen/server.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

std::string tick_name(std::uint64_t tick) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "t%05llu", static_cast<unsigned long long>(tick));
  return buf;
}

int cmd_gen_map(std::uint64_t seed, int rooms, double extent, const std::string& out) {
  multigen::LevelSpec spec;
  spec.seed = seed;
  spec.room_count = rooms;
  spec.grid_extent = extent;
  const multigen::WorldMap map = multigen::generate_map(spec);
  const auto report = multigen::validate_map(map);
  if (!report.ok()) {
    std::cerr << report.summary();
    return kExitFailure;
  }
  multigen::save_map(out, map);
  std::cout << "wrote " << out << ": " << map.vertices.size() << " vertices, " << map.edges.size() << " edges, "
            << map.spawns.size() << " spawns\n";
  return kExitOk;
}

int cmd_validate(const std::string& path) {
  const multigen::WorldMap map = multigen::parse_map_string(multigen::read_text_file(path));
  const auto report = multigen::validate_map(map);
  if (!report.ok()) {
    std::cout << report.summary();
    return kExitFailure;
  }
  std::cout << "ok: " << map.edges.size() << " edges, " << map.spawns.size() << " spawns\n";
  return kExitOk;
}

int cmd_minimap(const std::string& path, const std::string& out, double scale) {
  const multigen::WorldMap map = multigen::load_map(path);
  std::vector<std::pair<multigen::PlayerId, multigen::Pose>> poses;
  for (std::size_t i = 0; i < map.spawns.size(); ++i) {
    poses.emplace_back("p" + std::to_string(i + 1), multigen::Pose(map.spawns[i].position, map.spawns[i].yaw));
  }
  multigen::write_ppm(out, multigen::rasterize_minimap(map, poses, scale).frame);
  return kExitOk;
}

volatile std::sig_atomic_t g_interrupted = 0;

int cmd_serve(const std::string& map_path, multigen::ServerConfig cfg) {
  multigen::WorldMap map = multigen::load_map(map_path, cfg.session.motion.collision_radius);
  multigen::Server server(std::move(cfg), std::move(map));
  const auto port = server.start();
  std::cout << "listening on port " << port << std::endl;
  std::signal(SIGINT, [](int) { g_interrupted = 1; });
  std::signal(SIGTERM, [](int) { g_interrupted = 1; });
  while (!g_interrupted && !server.finished()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  server.stop();
  std::cout << "stopped at tick " << server.session().tick() << std::endl;
  return kExitOk;
}

int cmd_replay(const std::string& path) {
  const multigen::ReplayLog log = multigen::load_replay(path);
  try {
    const auto outcome = multigen::replay_from_log(log);
    std::cout << "final tick " << outcome.final_state.tick << "\nfinal hash " << multigen::to_hex(outcome.final_hash)
              << "\n";
    return kExitOk;
  } catch (const multigen::DivergenceError& e) {
    std::cerr << e.what() << "\n";
    std::cout << "divergent tick " << e.checkpoint_tick() << "\n";
    return kExitFailure;
  }
}

int cmd_eval_presence(const std::string& log_path, const std::string& backend_name, const std::string& out) {
  const multigen::ReplayLog log = multigen::load_replay(log_path);
  const auto backend = multigen::make_backend(backend_name);
  const auto ev = multigen::evaluate_rollout(log, *backend);
  const std::string report = multigen::presence_report(ev);
  if (out.empty() || out == "-") {
    std::cout << report;
  } else {
    multigen::write_text_file(out, report);
    std::cout << "wrote " << out << "\n";
  }
  return kExitOk;
}

int cmd_render_rollout(const std::string& map_path, const std::string& actions_path, const std::string& out_dir,
                       std::uint64_t seed, std::vector<std::string> extra_players, double minimap_scale) {
  namespace fs = std::filesystem;
  const multigen::WorldMap map = multigen::canonicalize_map(multigen::load_map(map_path));
  std::ifstream script_in(actions_path);
  if (!script_in) throw multigen::Error("cannot open " + actions_path);
  const multigen::ActionScript script = multigen::parse_action_script(script_in);
  fs::create_directories(out_dir);

  std::set<multigen::PlayerId> players(extra_players.begin(), extra_players.end());
  players.insert(script.players.begin(), script.players.end());

  const multigen::MotionConfig motion;
  const multigen::ViewConfig view;
  const multigen::ReferenceBackend backend;
  std::ofstream log_out(fs::path(out_dir) / "rollout.replay", std::ios::binary | std::ios::trunc);
  multigen::ReplayRecorder recorder(log_out, map, seed, motion);

  multigen::WorldState state = multigen::new_world(map, seed, motion.collision_radius);
  multigen::TickInput first;
  for (const auto& id : players) {
    state = multigen::add_player(std::move(state), id);
    first.joins.push_back(id);
  }
  std::map<multigen::PlayerId, multigen::ObservationContext> contexts;

  const std::uint64_t ticks = std::max<std::uint64_t>(script.length(), 1);
  std::size_t frames = 0;
  for (std::uint64_t t = 0; t < ticks; ++t) {
    const std::string suffix = tick_name(t) + ".ppm";
    std::vector<std::pair<multigen::PlayerId, multigen::Pose>> poses;
    for (const auto& [id, p] : state.players) {
      if (!p.active()) continue;
      poses.emplace_back(id, p.pose);
      auto ctx = contexts.try_emplace(id, 4, view.width, view.height).first;
      const auto& scripted = script.at(t);
      const multigen::Action action = scripted.contains(id) ? scripted.at(id) : multigen::Action{};
      multigen::Frame frame = backend.observe(ctx->second, backend.condition(state, id, view), action, view);
      multigen::write_ppm((fs::path(out_dir) / (id + "_" + suffix)).string(), frame);
      ctx->second.push(std::move(frame));
      ++frames;
    }
    multigen::write_ppm((fs::path(out_dir) / ("minimap_" + suffix)).string(),
                        multigen::rasterize_minimap(map, poses, minimap_scale).frame);

    multigen::TickInput input = t == 0 ? first : multigen::TickInput{};
    input.tick = t;
    for (const auto& [id, a] : script.at(t)) input.actions[id] = a;
    auto adv = multigen::advance_world(std::move(state), input.actions, motion);
    state = std::move(adv.state);
    recorder.record(input, state);
  }
  recorder.finish(state);
  std::cout << "wrote " << frames << " first-person frames and " << ticks << " minimaps to " << out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multigen: shared-memory world engine tools"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int rooms = 6;
  double extent = 64.0;
  std::string out;
  auto* gen = app.add_subcommand("gen-map", "Generate a procedural rooms-and-corridors map");
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--rooms", rooms, "Number of rooms")->check(CLI::PositiveNumber);
  gen->add_option("--extent", extent, "Side length of the square layout area");
  gen->add_option("--out", out, "Output map file")->required();

  std::string map_path;
  auto* validate = app.add_subcommand("validate", "Validate a map file");
  validate->add_option("--map", map_path, "Map file")->required();

  double scale = 4.0;
  auto* minimap = app.add_subcommand("minimap", "Rasterize a top-down minimap with spawn arrows (PPM)");
  minimap->add_option("--map", map_path, "Map file")->required();
  minimap->add_option("--out", out, "Output PPM")->required();
  minimap->add_option("--scale", scale, "Pixels per world unit")->check(CLI::PositiveNumber);

  multigen::ServerConfig server_cfg;
  std::string render_mode = "readout";
  auto* serve = app.add_subcommand("serve", "Run the authoritative multiplayer server");
  serve->add_option("--map", map_path, "Map file")->required();
  serve->add_option("--seed", server_cfg.seed, "World seed");
  serve->add_option("--host", server_cfg.host, "Listen address");
  serve->add_option("--port", server_cfg.port, "Listen port (0 = ephemeral)");
  serve->add_option("--tick-rate", server_cfg.session.tick_rate, "Ticks per second")->check(CLI::PositiveNumber);
  serve->add_option("--max-players", server_cfg.session.max_players, "Player limit")->check(CLI::PositiveNumber);
  serve->add_option("--record", server_cfg.record_path, "Write a replay log to this path");
  serve->add_option("--render-mode", render_mode, "readout | frames")->check(CLI::IsMember({"readout", "frames"}));
  serve->add_option("--ticks", server_cfg.max_ticks, "Stop after this many ticks (0 = run until interrupted)");

  std::string log_path;
  auto* replay = app.add_subcommand("replay", "Re-run a replay log and verify its hashes");
  replay->add_option("--log", log_path, "Replay log")->required();

  std::string backend = "reference";
  auto* eval = app.add_subcommand("eval-presence", "Score opponent presence in rendered frames against geometry");
  eval->add_option("--log", log_path, "Replay log")->required();
  eval->add_option("--backend", backend, "reference | no-sprites | no-occlusion")
      ->check(CLI::IsMember({"reference", "no-sprites", "no-occlusion"}));
  eval->add_option("--out", out, "Report path (default: stdout)");

  std::string actions_path;
  std::string out_dir;
  std::vector<std::string> players{"p1"};
  auto* render = app.add_subcommand("render-rollout", "Render per-tick first-person and minimap frames for a script");
  render->add_option("--map", map_path, "Map file")->required();
  render->add_option("--actions", actions_path, "Action script")->required();
  render->add_option("--out-dir", out_dir, "Output directory")->required();
  render->add_option("--seed", seed, "World seed");
  render->add_option("--players", players, "Players present from tick 0 besides those in the script")->delimiter(',');
  render->add_option("--minimap-scale", scale, "Minimap pixels per world unit")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen_map(seed, rooms, extent, out);
    if (*validate) return cmd_validate(map_path);
    if (*minimap) return cmd_minimap(map_path, out, scale);
    if (*serve) {
      server_cfg.session.render_mode = render_mode == "frames" ? multigen::RenderMode::frames : multigen::RenderMode::readout;
      return cmd_serve(map_path, server_cfg);
    }
    if (*replay) return cmd_replay(log_path);
    if (*eval) return cmd_eval_presence(log_path, backend, out);
    if (*render) return cmd_render_rollout(map_path, actions_path, out_dir, seed, players, scale);
  } catch (const multigen::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
