#pragma once

// Occlusion-guided random search: candidate occluding vehicles are placed on
// a lattice along every lane, and a scene copy is emitted for each candidate
// that blocks a sightline between two of the scene's original vehicles.

#include "hocc/lane_map.hpp"
#include "hocc/occlusion.hpp"
#include "hocc/scene.hpp"
#include "hocc/tracks.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hocc {

/// Empirical speed distribution of one lane in 1 m/s bins; bin b covers
/// [b, b + 1).
struct SpeedHistogram {
  std::vector<double> probabilities;
};

/// Per-lane histograms; lanes without data sample uniform[0, speed_limit].
struct SpeedSampler {
  std::map<int, SpeedHistogram> lanes;

  static SpeedSampler from_dataset(const TrackDataset& ds);
  double sample(int lane, const LaneMap& map, std::uint64_t seed) const;
};

struct InjectionConfig {
  double spacing = 2.0;  ///< lattice step along each centerline, meters
  double min_gap = 1.0;  ///< minimum footprint clearance to existing vehicles
  double margin = 5.0;   ///< expansion of the scene's bounding box
  VehicleFootprint footprint;
  SpeedSampler speeds;
  std::uint64_t seed = 0;
};

struct CandidateOV {
  int index = 0;
  int lane = -1;
  double s = 0;
  VehicleState state;
};

/// Deterministic per-(seed, scene, candidate) seed.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t scene_index, std::uint64_t candidate_index);

/// Lattice points `k * spacing` on every lane (inclusive of both ends) whose
/// position lies in the scene's bounding box expanded by `margin` (every
/// point when the scene is empty), minus those closer than `min_gap` to an
/// existing footprint. Ordered by (lane, s).
std::vector<CandidateOV> sample_candidates(const Scene& scene, const LaneMap& map, const InjectionConfig& cfg,
                                           std::uint64_t scene_index = 0);

/// Copy of `scene` with the candidate added as an injected occluding vehicle.
Scene inject(const Scene& scene, const CandidateOV& cand, const InjectionConfig& cfg);

/// True when the candidate is the occluder of some ordered pair among the
/// scene's original vehicles.
bool candidate_occludes(const Scene& injected, VehicleId ov, const std::vector<VehicleId>& original,
                        const RayBudget& budget);

/// Scenes of `scene` that enter the occlusion set: the scene itself when it
/// already contains an occlusion, then one copy per occluding candidate.
std::vector<Scene> search_scene(const Scene& scene, std::uint64_t scene_index, const LaneMap& map,
                                const InjectionConfig& cfg, const RayBudget& budget);

std::vector<Scene> occlusion_guided_search(const std::vector<Scene>& scenes, const LaneMap& map,
                                           const InjectionConfig& cfg, const RayBudget& budget);

std::string speed_sampler_to_json(const SpeedSampler& s);

}  // namespace hocc
