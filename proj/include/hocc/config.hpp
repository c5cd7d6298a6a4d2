#pragma once

// Every tunable of the pipeline in one place. Files use a flat TOML subset:
// one `key = value` per line, `#` comments, numbers and booleans only.

#include "hocc/generator.hpp"
#include "hocc/hypergame.hpp"
#include "hocc/occlusion.hpp"
#include "hocc/tracks.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace hocc {

struct RunConfig {
  // Vehicle footprint.
  double vehicle_length = 4.1;
  double vehicle_width = 1.8;
  // Visibility.
  double cell_size = 0.1;
  int epsilon = 3;
  int n_min = 5;
  int n_max = 64;
  double k_att = 400.0;
  double max_grid_cells = 4e8;
  // Injection.
  double spacing = 2.0;
  double min_gap = 1.0;
  double candidate_margin = 5.0;
  // Utilities and games.
  double gamma = 0.5;
  double sigmoid_midpoint = 1.0;
  double sigmoid_slope = 1.5;
  double progress_norm = kDefaultMaxSpeed * 6.0;
  std::uint64_t max_game_cells = 2000000;
  // Motion.
  double dt = 0.1;
  double horizon = 6.0;
  double max_decel = 8.0;
  double brake_decel = 6.0;
  double max_lateral = 1.5;
  // Classification.
  double theta = 2.0;
  // Ingestion.
  double max_speed = kDefaultMaxSpeed;
  double max_lane_distance = 5.0;
  // Run control; `jobs` never affects outputs and is not serialized.
  std::uint64_t seed = 0;
  std::uint64_t limit_scenes = 0;  ///< 0 = no limit
  unsigned jobs = 1;

  RayBudget ray_budget() const;
  HypergameParams hypergame_params() const;
  MotionParams motion_params() const;
  InjectionConfig injection_config(SpeedSampler speeds) const;
  IngestOptions ingest_options() const;

  /// Throws Error naming the first violated constraint.
  void validate() const;
};

/// Applies `key = value` lines onto `cfg`. Unknown keys and malformed values
/// raise ParseError.
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source = "<config>");
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Sets one key; returns false when the key is unknown.
bool set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Canonical `key = value` form (every serialized key, fixed order).
std::string config_to_text(const RunConfig& cfg);
/// The same keys as a JSON object.
std::string config_to_json(const RunConfig& cfg);

}  // namespace hocc
