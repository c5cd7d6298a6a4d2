#pragma once

// Stage functions of the validation pipeline and the end-to-end driver.
// Every stage maps scenes independently and reassembles results in input
// order, so the worker count never changes outputs.

#include "hocc/analysis.hpp"
#include "hocc/config.hpp"
#include "hocc/generator.hpp"
#include "hocc/hypergame.hpp"
#include "hocc/lane_map.hpp"
#include "hocc/scene.hpp"
#include "hocc/tracks.hpp"

#include <exception>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hocc {

/// Calls `f(i)` for i in [0, n) on up to `jobs` threads. The first exception
/// by index is rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& f);

template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, unsigned jobs, F&& f) {
  std::vector<std::optional<T>> slots(n);
  parallel_for(n, jobs, [&](std::size_t i) { slots[i].emplace(f(i)); });
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Situations of the dataset, truncated to `limit_scenes` when non-zero.
std::vector<Scene> extract_stage(const TrackDataset& ds, const LaneMap& map, const RunConfig& cfg);

/// Scenes that already contain an occlusion (no injection).
std::vector<Scene> scan_stage(const std::vector<Scene>& scenes, const RunConfig& cfg);

/// Occlusion-guided injection over every scene.
std::vector<Scene> inject_stage(const std::vector<Scene>& scenes, const LaneMap& map, const InjectionConfig& inj,
                                const RunConfig& cfg);

struct SceneVerdict {
  std::optional<OccRecord> record;  ///< retained OCC
  bool occ_candidate = false;       ///< passed classification, before the resolution check
  std::optional<std::string> skipped;
  double dor = 0;
};

/// Hypergame, DOR, classification and resolution check for one scene.
SceneVerdict validate_scene(const Scene& scene, const LaneMap& map, const RunConfig& cfg);

struct ValidationOutcome {
  std::vector<OccRecord> records;
  std::size_t occ_candidates = 0;
  std::vector<std::pair<std::string, std::string>> skipped;  ///< (scene id, reason)
};

ValidationOutcome validate_stage(const std::vector<Scene>& scenes, const LaneMap& map, const RunConfig& cfg);

/// Files produced by a command, relative to its output directory.
struct Manifest {
  std::string command;
  std::filesystem::path out_dir;
  std::vector<std::filesystem::path> files;
  std::string to_json() const;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

struct PipelineInputs {
  std::filesystem::path tracks;
  std::filesystem::path map;
  std::optional<std::filesystem::path> scenes;  ///< start from a scene list instead of tracks
  std::filesystem::path out;
};

Manifest run_ingest(const PipelineInputs& in, const RunConfig& cfg);
Manifest run_extract(const PipelineInputs& in, const RunConfig& cfg);
Manifest run_scan(const PipelineInputs& in, const RunConfig& cfg);
Manifest run_inject(const PipelineInputs& in, const RunConfig& cfg);
Manifest run_validate(const PipelineInputs& in, const RunConfig& cfg);
/// Rebuilds the report and plots from record files in `in.out`.
Manifest run_analyze(const PipelineInputs& in, const RunConfig& cfg);
/// Both passes (baseline and injection) and the report.
Manifest run_pipeline(const PipelineInputs& in, const RunConfig& cfg);

}  // namespace hocc
