#pragma once

// Synthetic four-way intersection and hand-built scene corpora used by the
// tests and by `hocc_fixtures`. Traffic keeps right; every approach carries
// one lane per direction, and each lane path is a full route (approach,
// turn, exit).

#include "hocc/lane_map.hpp"
#include "hocc/scene.hpp"
#include "hocc/tracks.hpp"

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace hocc::fixtures {

/// Approach by the direction the vehicle comes from.
enum class Approach { south, east, north, west };

struct IntersectionSpec {
  double lane_offset = 1.75;   ///< centerline distance from the road axis
  double turn_start = 12.0;    ///< turns begin and end at this distance from the center
  double polygon_half = 14.0;  ///< half side of the square intersection polygon
  double reach = 70.0;         ///< route length before and after the box
  double through_limit = 14.0;
  double left_limit = 10.0;
  double right_limit = 8.0;
};

/// Lane ids: 10 * (approach + 1) + {0 through, 1 left, 2 right}.
int lane_id(Approach from, TurnType turn);

LaneMap four_way(const IntersectionSpec& spec = {});

/// Vehicle placed on the lane centerline at arclength `s`, moving along it.
SceneVehicle on_lane(const LaneMap& map, VehicleId id, int lane, double s, double speed, Role role = Role::other);

/// Arclength on `lane` where it crosses `other`.
double crossing_s(const LaneMap& map, int lane, int other);

/// One snapshot per layout, layout i at time i * `spacing`. Vehicle ids are
/// kept as given and must be unique across layouts.
TrackDataset snapshot_dataset(const std::vector<std::vector<SceneVehicle>>& layouts, double dt = 0.1,
                              double spacing = 1.0);

/// Scene with the first vehicle as subject and the rest relevant.
Scene make_scene(std::vector<SceneVehicle> vehicles, const std::string& id = "fixture", double time = 0);

/// Uniform sampling ranges for LTAP layouts. `meet` offsets the oncoming
/// vehicle's arrival at the crossing from the turner's.
struct LayoutRanges {
  std::pair<double, double> turner_advance{0.0, 2.0};  ///< meters past the polygon edge
  std::pair<double, double> turner_speed{7.0, 10.0};
  std::pair<double, double> oncoming_speed{9.0, 13.0};
  std::pair<double, double> meet{0.3, 1.2};  ///< seconds
};

/// Narrow ranges where an occluder injected ahead of the turner hides the
/// oncoming vehicle until a head-on impact can no longer be braked away.
LayoutRanges tagging_on_ranges();

/// LTAP layouts: a left turner inside the intersection and an oncoming
/// through vehicle timed to meet it, with clear mutual visibility.
std::vector<std::vector<SceneVehicle>> tagging_on_layouts(const LaneMap& map, int count, std::uint64_t seed,
                                                          VehicleId first_id = 1, const LayoutRanges& ranges = {});

/// Writes map.json, tagging_on_tracks.csv (8 layouts) and
/// unoccluded_tracks.csv (50 layouts) into `dir`.
void write_corpus(const std::filesystem::path& dir);

}  // namespace hocc::fixtures
