#include "hocc/config.hpp"

#include "hocc/error.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <variant>
#include <vector>

namespace hocc {

RayBudget RunConfig::ray_budget() const {
  RayBudget b;
  b.n_min = n_min;
  b.n_max = n_max;
  b.k_att = k_att;
  b.epsilon = epsilon;
  b.cell_size = cell_size;
  b.max_cells = max_grid_cells;
  return b;
}

MotionParams RunConfig::motion_params() const {
  MotionParams m;
  m.dt = dt;
  m.horizon = horizon;
  m.max_decel = max_decel;
  m.brake_decel = brake_decel;
  m.max_lateral = max_lateral;
  return m;
}

HypergameParams RunConfig::hypergame_params() const {
  HypergameParams h;
  h.utility.gamma = gamma;
  h.utility.sigmoid_midpoint = sigmoid_midpoint;
  h.utility.sigmoid_slope = sigmoid_slope;
  h.utility.progress_norm = progress_norm;
  h.motion = motion_params();
  h.limits.max_cells = max_game_cells;
  return h;
}

InjectionConfig RunConfig::injection_config(SpeedSampler speeds) const {
  InjectionConfig c;
  c.spacing = spacing;
  c.min_gap = min_gap;
  c.margin = candidate_margin;
  c.footprint = {vehicle_length, vehicle_width};
  c.speeds = std::move(speeds);
  c.seed = seed;
  return c;
}

IngestOptions RunConfig::ingest_options() const { return {max_speed, max_lane_distance}; }

void RunConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw Error(std::string("invalid configuration: ") + what);
  };
  need(vehicle_length > 0 && vehicle_width > 0, "vehicle dimensions must be positive");
  need(cell_size > 0, "cell_size must be positive");
  need(epsilon >= 1, "epsilon must be at least 1");
  need(n_min >= 1 && n_min <= n_max, "ray counts need 1 <= n_min <= n_max");
  need(k_att > 0, "k_att must be positive");
  need(spacing > 0, "spacing must be positive");
  need(min_gap >= 0, "min_gap must be non-negative");
  need(gamma > -1 && gamma < 1, "gamma must lie in (-1, 1)");
  need(sigmoid_slope > 0, "sigmoid_slope must be positive");
  need(progress_norm > 0, "progress_norm must be positive");
  need(dt > 0 && horizon > 0, "dt and horizon must be positive");
  need(brake_decel > 0 && max_decel > 0, "decelerations must be positive");
  need(jobs >= 1, "jobs must be at least 1");
}

namespace {

using Field = std::variant<double RunConfig::*, int RunConfig::*, std::uint64_t RunConfig::*>;

const std::vector<std::pair<const char*, Field>>& fields() {
  static const std::vector<std::pair<const char*, Field>> f{
      {"vehicle_length", &RunConfig::vehicle_length},
      {"vehicle_width", &RunConfig::vehicle_width},
      {"cell_size", &RunConfig::cell_size},
      {"epsilon", &RunConfig::epsilon},
      {"n_min", &RunConfig::n_min},
      {"n_max", &RunConfig::n_max},
      {"k_att", &RunConfig::k_att},
      {"max_grid_cells", &RunConfig::max_grid_cells},
      {"spacing", &RunConfig::spacing},
      {"min_gap", &RunConfig::min_gap},
      {"candidate_margin", &RunConfig::candidate_margin},
      {"gamma", &RunConfig::gamma},
      {"sigmoid_midpoint", &RunConfig::sigmoid_midpoint},
      {"sigmoid_slope", &RunConfig::sigmoid_slope},
      {"progress_norm", &RunConfig::progress_norm},
      {"max_game_cells", &RunConfig::max_game_cells},
      {"dt", &RunConfig::dt},
      {"horizon", &RunConfig::horizon},
      {"max_decel", &RunConfig::max_decel},
      {"brake_decel", &RunConfig::brake_decel},
      {"max_lateral", &RunConfig::max_lateral},
      {"theta", &RunConfig::theta},
      {"max_speed", &RunConfig::max_speed},
      {"max_lane_distance", &RunConfig::max_lane_distance},
      {"seed", &RunConfig::seed},
      {"limit_scenes", &RunConfig::limit_scenes},
  };
  return f;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars rejects a leading '+'.
    if (first != last && *first == '+') ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

bool set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "jobs") {
    if (!parse_number(value, cfg.jobs)) throw Error("bad value for 'jobs': " + value);
    return true;
  }
  for (const auto& [name, field] : fields()) {
    if (key != name) continue;
    const bool ok = std::visit([&](auto member) { return parse_number(value, cfg.*member); }, field);
    if (!ok) throw Error("bad value for '" + key + "': " + value);
    return true;
  }
  return false;
}

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, n, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (!set_config_value(cfg, key, value)) throw ParseError(source, n, "unknown key '" + key + "'");
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, n, e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string(), "cannot open config file");
  std::ostringstream ss;
  ss << f.rdbuf();
  apply_config_text(cfg, ss.str(), path.string());
}

std::string config_to_text(const RunConfig& cfg) {
  const auto j = nlohmann::ordered_json::parse(config_to_json(cfg));
  std::string out;
  for (const auto& [k, v] : j.items()) out += k + " = " + v.dump() + "\n";
  return out;
}

std::string config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  for (const auto& [name, field] : fields())
    std::visit([&](auto member) { j[name] = cfg.*member; }, field);
  return j.dump();
}

}  // namespace hocc
