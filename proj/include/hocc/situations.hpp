#pragma once

#include "hocc/lane_map.hpp"
#include "hocc/scene.hpp"
#include "hocc/tracks.hpp"

#include <optional>
#include <vector>

namespace hocc {

inline constexpr double kLeaderHorizon = 50.0;

/// Arclength of a vehicle along its assigned lane path.
double lane_arclength(const SceneVehicle& v, const LaneMap& map);

/// Nearest vehicle ahead on the same lane path, within kLeaderHorizon.
std::optional<VehicleId> leading_vehicle(VehicleId v, const Scene& scene, const LaneMap& map);

/// Situations at a single instant: one scene per turning vehicle inside the
/// intersection polygon, holding the subject and its relevant vehicles.
/// `present` may be in any order; ids must be unique.
std::vector<Scene> situations_at(const std::vector<SceneVehicle>& present, double time, const LaneMap& map);

/// Every LTAP/RT situation in the dataset, ordered by (time, subject id).
std::vector<Scene> extract_situations(const TrackDataset& ds, const LaneMap& map);

/// Which relevance clauses `v` satisfies with respect to the scene's subject:
/// bit 0 on a conflicting lane, bit 1 the subject's leader, bit 2 the leader
/// of a conflicting vehicle.
unsigned relevance_clauses(VehicleId v, const Scene& scene, const LaneMap& map);

}  // namespace hocc
