#pragma once

#include "hocc/lane_map.hpp"
#include "hocc/scene.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace hocc {

struct Track {
  VehicleId id = 0;
  int lane = -1;
  std::vector<double> times;
  std::vector<VehicleState> states;
};

/// Per-vehicle time series sampled at a common period `dt`.
struct TrackDataset {
  double dt = 0.1;
  std::map<VehicleId, Track> tracks;

  bool empty() const { return tracks.empty(); }
  bool operator==(const TrackDataset&) const;
};

struct IngestOptions {
  double max_speed = kDefaultMaxSpeed;
  double max_lane_distance = 5.0;
};

TrackDataset ingest_tracks(const std::filesystem::path& path, const LaneMap& map, const IngestOptions& opts = {});
TrackDataset parse_tracks_csv(const std::string& text, const LaneMap& map, const IngestOptions& opts = {},
                              const std::string& source = "<tracks>");

/// Canonical CSV: `# dt=` header, full column set, rows ordered by
/// (track_id, t), shortest round-trip number formatting.
std::string tracks_to_csv(const TrackDataset& ds);

/// Linear re-interpolation of every track onto a `dt` grid.
TrackDataset resample(const TrackDataset& ds, double dt);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace hocc
