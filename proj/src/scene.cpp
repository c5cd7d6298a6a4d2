#include "hocc/scene.hpp"

#include "hocc/error.hpp"

#include <algorithm>

namespace hocc {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::subject: return "subject";
    case Role::relevant: return "relevant";
    case Role::injected_ov: return "injected_ov";
    case Role::other: return "other";
  }
  return "other";
}

std::string_view to_string(ScenarioKind k) { return k == ScenarioKind::ltap ? "LTAP" : "RT"; }

Role role_from_string(std::string_view s) {
  if (s == "subject") return Role::subject;
  if (s == "relevant") return Role::relevant;
  if (s == "injected_ov") return Role::injected_ov;
  if (s == "other") return Role::other;
  throw Error("unknown role '" + std::string(s) + "'");
}

ScenarioKind scenario_kind_from_string(std::string_view s) {
  if (s == "LTAP") return ScenarioKind::ltap;
  if (s == "RT") return ScenarioKind::rt;
  throw Error("unknown scenario kind '" + std::string(s) + "'");
}

const SceneVehicle* Scene::find(VehicleId vid) const {
  auto it = std::lower_bound(vehicles.begin(), vehicles.end(), vid,
                             [](const SceneVehicle& v, VehicleId id) { return v.id < id; });
  return it != vehicles.end() && it->id == vid ? &*it : nullptr;
}

const SceneVehicle& Scene::at(VehicleId vid) const {
  if (const auto* v = find(vid)) return *v;
  throw Error("scene " + id + " has no vehicle " + std::to_string(vid));
}

std::optional<VehicleId> Scene::subject() const {
  for (const auto& v : vehicles)
    if (v.role == Role::subject) return v.id;
  return std::nullopt;
}

std::vector<VehicleId> Scene::ids() const {
  std::vector<VehicleId> out;
  out.reserve(vehicles.size());
  for (const auto& v : vehicles) out.push_back(v.id);
  return out;
}

Scene Scene::subset(const std::vector<VehicleId>& keep) const {
  Scene out = *this;
  out.vehicles.clear();
  for (const auto& v : vehicles)
    if (std::find(keep.begin(), keep.end(), v.id) != keep.end()) out.vehicles.push_back(v);
  return out;
}

std::optional<std::string> check_scene(const Scene& scene) {
  int subjects = 0;
  for (std::size_t i = 0; i < scene.vehicles.size(); ++i) {
    const auto& v = scene.vehicles[i];
    if (v.role == Role::subject) ++subjects;
    if (i > 0 && scene.vehicles[i - 1].id >= v.id) return "vehicle ids not strictly ascending";
    if (!(v.footprint.length > 0 && v.footprint.width > 0)) return "non-positive footprint";
  }
  if (subjects != 1) return "expected exactly one subject, found " + std::to_string(subjects);
  for (std::size_t i = 0; i < scene.vehicles.size(); ++i)
    for (std::size_t j = i + 1; j < scene.vehicles.size(); ++j)
      if (overlaps(scene.vehicles[i].box(), scene.vehicles[j].box()))
        return "footprints of " + std::to_string(scene.vehicles[i].id) + " and " +
               std::to_string(scene.vehicles[j].id) + " overlap";
  return std::nullopt;
}

}  // namespace hocc
