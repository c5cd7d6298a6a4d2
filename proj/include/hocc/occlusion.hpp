#pragma once

// Dynamic-occlusion indicator by voxel raycasting. Footprints are
// rasterized onto a global lattice of square cells; rays are marched cell
// by cell (Amanatides-Woo) from the observer's centroid across the target's
// subtended angle.

#include "hocc/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace hocc {

struct CellIndex {
  long long ix = 0;
  long long iy = 0;
  bool operator==(const CellIndex&) const = default;
};

/// Dense occupancy grid aligned to the lattice `floor(p / cell_size)`, so
/// cell boundaries do not depend on which vehicles are present.
class OccupancyGrid {
 public:
  static constexpr VehicleId kEmpty = std::numeric_limits<VehicleId>::min();

  OccupancyGrid() = default;
  OccupancyGrid(double cell_size, CellIndex origin, long long width, long long height);

  double cell_size() const { return cell_size_; }
  CellIndex origin() const { return origin_; }
  long long width() const { return width_; }
  long long height() const { return height_; }

  CellIndex cell_of(const Vec2d& p) const;
  Vec2d cell_center(const CellIndex& c) const;
  bool in_bounds(const CellIndex& c) const;
  bool in_bounds(const Vec2d& p) const { return in_bounds(cell_of(p)); }

  VehicleId at(const CellIndex& c) const;
  void set(const CellIndex& c, VehicleId v);
  std::size_t occupied_count() const;

 private:
  std::size_t flat(const CellIndex& c) const;

  double cell_size_ = 0.1;
  CellIndex origin_;
  long long width_ = 0;
  long long height_ = 0;
  std::vector<VehicleId> cells_;
};

struct RayBudget {
  int n_min = 5;
  int n_max = 64;
  double k_att = 400.0;  ///< rays * meters
  int epsilon = 3;
  double cell_size = 0.1;
  double max_cells = 4e8;

  /// Rays allotted to a target `distance` meters away.
  int rays_for(double distance) const;
};

struct PairVisibility {
  int ray_count = 0;
  int hit_count = 0;
  std::optional<VehicleId> occluder;
  bool occluded = false;
};

/// Visibility for ordered (observer, target) pairs. O(i, j, k) = 1 exactly
/// when pair (i, k) is occluded with occluder j.
class VisibilityReport {
 public:
  void set(VehicleId observer, VehicleId target, PairVisibility v) { pairs_[{observer, target}] = v; }
  const PairVisibility* find(VehicleId observer, VehicleId target) const;
  bool occluded(VehicleId observer, VehicleId target) const;
  /// O(observer, occluder, target).
  bool indicator(VehicleId observer, VehicleId occluder, VehicleId target) const;
  bool any_occlusion() const;
  const std::map<std::pair<VehicleId, VehicleId>, PairVisibility>& pairs() const { return pairs_; }

 private:
  std::map<std::pair<VehicleId, VehicleId>, PairVisibility> pairs_;
};

/// Marks every cell whose center lies inside exactly one footprint.
OccupancyGrid rasterize(const Scene& scene, double cell_size, double max_cells = 4e8);

/// Cells crossed by the segment, in traversal order, clipped to the grid.
std::vector<CellIndex> ray_cells(const OccupancyGrid& grid, const Vec2d& from, const Vec2d& to);

/// Occupant of the first non-ignored occupied cell along the segment.
std::optional<VehicleId> cast_ray(const OccupancyGrid& grid, const Vec2d& from, const Vec2d& to,
                                  const std::vector<VehicleId>& ignore = {});

/// One cast ray of the fan, for diagnostics and oracle comparison.
struct RaySample {
  VehicleId observer = 0;
  VehicleId target = 0;
  Vec2d origin = Vec2d::Zero();
  Vec2d end = Vec2d::Zero();
  std::optional<VehicleId> first_hit;
};

/// Unit directions of the ray fan from `observer` towards `target`: spread
/// uniformly, endpoints inclusive, over the angle subtended by the target's
/// footprint inset by one cell on every side. Empty when the target is
/// closer than the observer's length (always visible).
std::vector<Vec2d> ray_fan(const SceneVehicle& observer, const SceneVehicle& target, const RayBudget& budget);

/// Ray end point used for a fan direction: just beyond the target's far side.
Vec2d ray_end(const SceneVehicle& observer, const SceneVehicle& target, const Vec2d& dir, const RayBudget& budget);

/// Occlusion indicator over all ordered pairs (restricted to `among` when
/// given). Rays are recorded into `rays` when non-null.
VisibilityReport occlusion_indicator(const Scene& scene, const RayBudget& budget,
                                     const std::vector<VehicleId>* among = nullptr,
                                     std::vector<RaySample>* rays = nullptr);

/// Writes `<stem>.pgm` (occupancy) and `<stem>_rays.json` for inspection.
void write_visibility_dump(const Scene& scene, const RayBudget& budget, const std::filesystem::path& dir,
                           const std::string& stem);

}  // namespace hocc
