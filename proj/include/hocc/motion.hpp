#pragma once

#include "hocc/lane_map.hpp"
#include "hocc/scene.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hocc {

enum class ManeuverKind { proceed, wait, track_speed, decelerate_to_stop, follow_lead };

std::string_view to_string(ManeuverKind k);
ManeuverKind maneuver_kind_from_string(std::string_view s);

struct Maneuver {
  ManeuverKind kind = ManeuverKind::track_speed;
  int lane = -1;
  bool operator==(const Maneuver&) const = default;
};

struct MotionParams {
  double dt = 0.1;
  double horizon = 6.0;
  double max_decel = 8.0;
  double brake_decel = 6.0;
  double max_lateral = 1.5;
  double lateral_settle = 3.0;
  std::array<double, 3> speed_factors{0.6, 0.8, 1.0};
  std::array<double, 3> stop_fractions{0.5, 0.75, 1.0};
  std::array<double, 3> follow_headways{0.5, 1.0, 1.5};
  double follow_standstill = 2.0;

  int sample_count() const { return static_cast<int>(std::lround(horizon / dt)) + 1; }
};

/// Time-sampled motion plan of one vehicle over the planning horizon.
struct Trajectory {
  VehicleId vehicle = 0;
  Maneuver maneuver;
  double target_speed = 0;
  VehicleFootprint footprint;
  std::vector<VehicleState> samples;
  /// Cumulative distance travelled along the sampled path.
  std::vector<double> travelled;
  /// Lane arclength gained over the horizon.
  double progress = 0;

  OrientedBoxd box(std::size_t k) const { return footprint.box(samples[k]); }
};

/// Maneuvers a vehicle may choose, by the turn type of its lane path;
/// follow_lead only when `has_leader`.
std::vector<Maneuver> admissible_maneuvers(const SceneVehicle& v, const LaneMap& map, bool has_leader);

/// Three cubic-Hermite arclength profiles composed with the lane path. An
/// infeasible maneuver yields an empty list.
std::vector<Trajectory> generate_trajectories(VehicleId v, const Scene& scene, const Maneuver& m, const LaneMap& map,
                                              const MotionParams& params = {});

struct GapProfile {
  VehicleId a = 0;
  VehicleId b = 0;
  std::vector<double> clearance;

  double min() const;
};

GapProfile gap_profile(const Trajectory& ta, const Trajectory& tb);

/// Minimum signed clearance over all pairs and samples.
double surrogate_s(const std::vector<GapProfile>& profiles);

/// Pairwise gap profiles of a joint plan (one trajectory per vehicle).
std::vector<GapProfile> joint_gap_profiles(const std::vector<const Trajectory*>& plan);

struct EmergencyBrake {
  std::vector<VehicleId> vehicles;
  double from_time = 0;
  double decel = 6.0;
};

struct Collision {
  std::size_t frame = 0;
  double time = 0;
  VehicleId a = 0;
  VehicleId b = 0;
  double clearance = 0;
};

struct Rollout {
  std::vector<Scene> frames;
  std::optional<Collision> collision;
};

/// Advances every vehicle along its trajectory; armed vehicles brake at a
/// constant rate along their planned path from `from_time`. Stops at
/// `until` or at the first frame with an overlapping pair.
Rollout forward_simulate(const Scene& scene, const std::vector<const Trajectory*>& plan, double until,
                         const std::optional<EmergencyBrake>& intervention = std::nullopt,
                         const MotionParams& params = {});

/// `vehicle_id,k,t,x,y,vx,vy,yaw` rows.
std::string trajectories_to_csv(const std::vector<const Trajectory*>& plan, double dt);

}  // namespace hocc
