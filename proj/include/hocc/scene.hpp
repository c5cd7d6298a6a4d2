#pragma once

#include "hocc/geometry.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hocc {

using VehicleId = int;

inline constexpr double kDefaultMaxSpeed = 22.0;

/// Kinematic state of one vehicle. Velocities and accelerations are in the
/// body frame: `vx`/`ax` lateral (positive left), `vy`/`ay` longitudinal.
struct VehicleState {
  double x = 0;
  double y = 0;
  double vx = 0;
  double vy = 0;
  double ax = 0;
  double ay = 0;
  double yaw = 0;

  Vec2d position() const { return {x, y}; }
  double speed() const { return std::hypot(vx, vy); }
  /// Velocity rotated into the map frame.
  Vec2d world_velocity() const {
    const double c = std::cos(yaw), s = std::sin(yaw);
    return {vy * c - vx * s, vy * s + vx * c};
  }

  bool operator==(const VehicleState&) const = default;
};

struct VehicleFootprint {
  double length = 4.1;
  double width = 1.8;

  OrientedBoxd box(const VehicleState& s) const { return make_box(s.position(), s.yaw, length, width); }
  bool operator==(const VehicleFootprint&) const = default;
};

enum class Role { subject, relevant, injected_ov, other };
enum class ScenarioKind { ltap, rt };

std::string_view to_string(Role r);
std::string_view to_string(ScenarioKind k);
Role role_from_string(std::string_view s);
ScenarioKind scenario_kind_from_string(std::string_view s);

struct SceneVehicle {
  VehicleId id = 0;
  VehicleState state;
  int lane = -1;
  Role role = Role::other;
  VehicleFootprint footprint;

  OrientedBoxd box() const { return footprint.box(state); }
  bool operator==(const SceneVehicle&) const = default;
};

/// Provenance of a scene copy: which situation it came from and which
/// injected candidate (if any) it carries.
struct Provenance {
  std::string source;
  int candidate = -1;
  unsigned long long seed = 0;
  bool operator==(const Provenance&) const = default;
};

/// Joint state of the vehicles forming one situation. Vehicles are kept in
/// ascending id order.
struct Scene {
  std::string id;
  double time = 0;
  ScenarioKind kind = ScenarioKind::ltap;
  std::vector<SceneVehicle> vehicles;
  Provenance provenance;

  const SceneVehicle* find(VehicleId id) const;
  const SceneVehicle& at(VehicleId id) const;
  std::optional<VehicleId> subject() const;
  std::vector<VehicleId> ids() const;
  /// Copy restricted to `keep`, preserving metadata.
  Scene subset(const std::vector<VehicleId>& keep) const;

  bool operator==(const Scene&) const = default;
};

/// Checks the scene invariants: a single subject, sorted unique ids and
/// pairwise disjoint footprints. Returns a description of the first
/// violation, or nothing.
std::optional<std::string> check_scene(const Scene& scene);

}  // namespace hocc
