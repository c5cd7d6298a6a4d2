#pragma once

// Level-0/level-1 hypergames over one scene, the dynamic occlusion risk
// (DOR) between the occlusion-resolved and the assembled occlusion-naive
// strategies, and the filter that turns DOR into occlusion-caused
// collision (OCC) records.

#include "hocc/game.hpp"
#include "hocc/lane_map.hpp"
#include "hocc/motion.hpp"
#include "hocc/occlusion.hpp"
#include "hocc/scene.hpp"
#include "hocc/taxonomy.hpp"

#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace hocc {

struct HypergameParams {
  UtilityParams utility;
  MotionParams motion;
  GameLimits limits;
};

/// H0 (the resolved game over every vehicle) and H1 (one view per vehicle
/// over the vehicles it can see). Views with equal player sets share one
/// GameView.
struct HypergameL1 {
  Scene base_scene;
  VisibilityReport report;
  std::map<VehicleId, std::vector<VehicleId>> visible;
  std::map<VehicleId, std::shared_ptr<const GameView>> views;
  std::shared_ptr<const GameView> resolved_game;
  HypergameParams params;
};

HypergameL1 build_hypergame(const Scene& scene, const VisibilityReport& report, const LaneMap& map,
                            const HypergameParams& params = {});

struct DorResult {
  double dor = 0;
  double s_resolved = 0;
  double s_naive = 0;
  /// Each vehicle's own component of its view's solution. Maneuver and
  /// trajectory indices refer to that vehicle's view.
  StrategyProfile naive_profile;
  StrategyProfile resolved_profile;
  /// Trajectories of both joint profiles, in vehicle id order.
  std::vector<Trajectory> naive_plan;
  std::vector<Trajectory> resolved_plan;
};

DorResult compute_dor(const HypergameL1& h);

std::vector<const Trajectory*> plan_pointers(const std::vector<Trajectory>& plan);

struct Impact {
  std::size_t frame = 0;
  double time = 0;  ///< seconds after the scene time
  VehicleId a = 0;
  VehicleId b = 0;
  double clearance = 0;
  std::vector<SceneVehicle> vehicles;  ///< every vehicle at the impact frame
  double relative_speed = 0;
};

struct OccRecord {
  Scene scene;
  std::map<VehicleId, std::vector<VehicleId>> visible;
  DorResult dor_result;
  Impact impact;
  double resolution_time = 0;  ///< seconds after the scene time
  double resolution_to_impact = 0;
  bool resolved_before_impact = false;
  Severity severity = Severity::S0;
  CollisionType collision_type = CollisionType::angle;
  bool tagging_on = false;
  /// Occluder between the colliding pair in the base scene, if any.
  std::optional<VehicleId> occluder;
};

/// Record when `dor >= theta` and the naive rollout overlaps; the impact is
/// the first overlapping frame.
std::optional<OccRecord> classify_occ(const HypergameL1& h, const DorResult& dor, double theta, const LaneMap& map);

struct ResolutionOutcome {
  bool retain = true;
  bool resolved_before_impact = false;
  double resolution_time = 0;
  double resolution_to_impact = 0;
};

/// Replays the naive rollout with visibility recomputed at every frame. At
/// the first frame where the colliding pair sees each other both brake at
/// `brake_decel`; the record is retained when they still collide.
ResolutionOutcome resolution_check(const OccRecord& record, const RayBudget& budget, const MotionParams& motion = {});

/// Applies resolution_check and stores its timing in the record.
bool apply_resolution_check(OccRecord& record, const RayBudget& budget, const MotionParams& motion = {});

}  // namespace hocc
