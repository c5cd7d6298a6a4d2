// Command-line driver for the occlusion-guided validation pipeline.

#include "hocc/config.hpp"
#include "hocc/error.hpp"
#include "hocc/pipeline.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

namespace {

struct Flags {
  std::string tracks;
  std::string map;
  std::string out = "out";
  std::string scenes;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> epsilon;
  std::optional<double> grid_size;
  std::optional<double> spacing;
  std::optional<double> theta;
  std::optional<unsigned> jobs;
  std::optional<std::uint64_t> limit_scenes;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--tracks", f.tracks, "Trajectory CSV");
  cmd->add_option("--map", f.map, "Lane map JSON");
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--scenes", f.scenes, "Scene JSON-lines file to start from instead of tracks");
  cmd->add_option("--config", f.config, "Flat key = value configuration file");
  cmd->add_option("--seed", f.seed, "Random seed for candidate speeds");
  cmd->add_option("--epsilon", f.epsilon, "Ray hits below which a target is occluded");
  cmd->add_option("--grid-size", f.grid_size, "Occupancy cell size in meters");
  cmd->add_option("--spacing", f.spacing, "Candidate spacing along lanes in meters");
  cmd->add_option("--theta", f.theta, "DOR threshold in meters");
  cmd->add_option("--jobs", f.jobs, "Worker threads");
  cmd->add_option("--limit-scenes", f.limit_scenes, "Process at most this many situations (0 = all)");
}

hocc::RunConfig resolve_config(const Flags& f) {
  hocc::RunConfig cfg;
  if (!f.config.empty()) hocc::apply_config_file(cfg, f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.epsilon) cfg.epsilon = *f.epsilon;
  if (f.grid_size) cfg.cell_size = *f.grid_size;
  if (f.spacing) cfg.spacing = *f.spacing;
  if (f.theta) cfg.theta = *f.theta;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (f.limit_scenes) cfg.limit_scenes = *f.limit_scenes;
  cfg.validate();
  return cfg;
}

/// Missing inputs per command, as a usage message; empty when satisfied.
std::string missing_inputs(const std::string& command, const Flags& f) {
  const bool has_source = !f.tracks.empty() || !f.scenes.empty();
  if ((command == "ingest" || command == "extract") && (f.tracks.empty() || f.map.empty()))
    return "--tracks and --map are required";
  if ((command == "scan" || command == "inject" || command == "run") && (f.map.empty() || !has_source))
    return "--map and one of --tracks/--scenes are required";
  if (command == "validate" && f.map.empty()) return "--map is required";
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Occlusion-guided hypergame safety validation"};
  app.require_subcommand(1);
  Flags flags;

  using Runner = hocc::Manifest (*)(const hocc::PipelineInputs&, const hocc::RunConfig&);
  const std::pair<const char*, std::pair<const char*, Runner>> commands[] = {
      {"ingest", {"Parse and normalize a track file", hocc::run_ingest}},
      {"extract", {"Extract LTAP/RT situations", hocc::run_extract}},
      {"scan", {"Detect naturalistic occlusions only", hocc::run_scan}},
      {"inject", {"Occlusion-guided occluder injection", hocc::run_inject}},
      {"validate", {"Hypergame DOR, OCC classification and resolution check", hocc::run_validate}},
      {"analyze", {"Report and plots from record files", hocc::run_analyze}},
      {"run", {"Full pipeline with the no-injection baseline", hocc::run_pipeline}},
  };
  std::vector<std::pair<CLI::App*, Runner>> subs;
  for (const auto& [name, info] : commands) {
    auto* cmd = app.add_subcommand(name, info.first);
    add_common(cmd, flags);
    subs.emplace_back(cmd, info.second);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const auto cfg = resolve_config(flags);
    hocc::PipelineInputs in;
    in.tracks = flags.tracks;
    in.map = flags.map;
    in.out = flags.out;
    if (!flags.scenes.empty()) in.scenes = flags.scenes;
    for (const auto& [cmd, runner] : subs) {
      if (!cmd->parsed()) continue;
      if (const auto why = missing_inputs(cmd->get_name(), flags); !why.empty()) {
        std::cerr << "hocc " << cmd->get_name() << ": " << why << "\nRun with --help for more information.\n";
        return 2;
      }
      const auto manifest = runner(in, cfg);
      std::cout << manifest.to_json() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "hocc: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
