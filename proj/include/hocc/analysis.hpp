#pragma once

#include "hocc/hypergame.hpp"
#include "hocc/lane_map.hpp"
#include "hocc/taxonomy.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hocc {

Severity severity(const OccRecord& record);
CollisionType collision_type(const OccRecord& record);

struct PassCounts {
  std::size_t situations = 0;
  std::size_t occlusion_scenes = 0;
  std::size_t occ_records = 0;
  bool operator==(const PassCounts&) const = default;
};

struct DurationSummary {
  std::size_t count = 0;
  double min = 0;
  double mean = 0;
  double max = 0;
};

struct ValidationReport {
  PassCounts baseline;
  PassCounts augmented;
  /// augmented / baseline OCC count, in percent; empty when the baseline is 0.
  std::optional<double> occ_gain_percent;
  std::array<std::size_t, 4> severity_histogram{};
  std::array<std::size_t, 4> type_histogram{};
  std::size_t tagging_on = 0;
  std::vector<double> resolution_to_impact;
  DurationSummary resolution_summary;
  std::size_t skipped_scenes = 0;
  /// Run parameters as a JSON object, copied verbatim into report.json.
  std::string parameters = "{}";
};

DurationSummary summarize(const std::vector<double>& samples);

ValidationReport aggregate(const std::vector<OccRecord>& records, const PassCounts& augmented,
                           const std::vector<OccRecord>& baseline_records, const PassCounts& baseline);

std::string report_to_json(const ValidationReport& report);
std::string report_summary(const ValidationReport& report);

/// Files written by emit_plots, relative to the output directory.
std::vector<std::filesystem::path> emit_plots(const ValidationReport& report, const std::vector<OccRecord>& records,
                                              const LaneMap* map, const std::filesystem::path& out_dir);

}  // namespace hocc
