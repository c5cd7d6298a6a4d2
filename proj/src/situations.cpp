#include "hocc/situations.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace hocc {

double lane_arclength(const SceneVehicle& v, const LaneMap& map) {
  return map.lane(v.lane).project(v.state.position()).s;
}

namespace {

std::optional<VehicleId> leader_among(const SceneVehicle& v, const std::vector<SceneVehicle>& all,
                                      const LaneMap& map) {
  const double s = lane_arclength(v, map);
  std::optional<VehicleId> best;
  double best_gap = kLeaderHorizon;
  for (const auto& o : all) {
    if (o.id == v.id || o.lane != v.lane) continue;
    const double gap = lane_arclength(o, map) - s;
    if (gap > 0 && gap <= best_gap && (!best || gap < best_gap)) {
      best = o.id;
      best_gap = gap;
    }
  }
  return best;
}

}  // namespace

std::optional<VehicleId> leading_vehicle(VehicleId v, const Scene& scene, const LaneMap& map) {
  return leader_among(scene.at(v), scene.vehicles, map);
}

std::vector<Scene> situations_at(const std::vector<SceneVehicle>& present_in, double time, const LaneMap& map) {
  std::vector<SceneVehicle> present = present_in;
  std::sort(present.begin(), present.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  std::vector<Scene> out;
  for (const auto& subj : present) {
    const auto& lane = map.lane(subj.lane);
    if (lane.turn() == TurnType::through || !map.in_intersection(subj.state.position())) continue;

    std::set<VehicleId> relevant;
    std::vector<const SceneVehicle*> conflicting;
    for (const auto& o : present)
      if (o.id != subj.id && map.conflicting(subj.lane, o.lane)) {
        relevant.insert(o.id);
        conflicting.push_back(&o);
      }
    if (auto l = leader_among(subj, present, map)) relevant.insert(*l);
    for (const auto* c : conflicting)
      if (auto l = leader_among(*c, present, map)) relevant.insert(*l);
    relevant.erase(subj.id);
    if (relevant.empty()) continue;

    Scene scene;
    scene.time = time;
    scene.kind = lane.turn() == TurnType::left ? ScenarioKind::ltap : ScenarioKind::rt;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "t%.3f-v%d", time, subj.id);
    scene.id = buf;
    scene.provenance.source = scene.id;
    for (const auto& v : present) {
      if (v.id != subj.id && !relevant.count(v.id)) continue;
      SceneVehicle sv = v;
      sv.role = v.id == subj.id ? Role::subject : Role::relevant;
      scene.vehicles.push_back(sv);
    }
    out.push_back(std::move(scene));
  }
  return out;
}

std::vector<Scene> extract_situations(const TrackDataset& ds, const LaneMap& map) {
  std::map<long long, std::vector<SceneVehicle>> by_tick;
  for (const auto& [id, tr] : ds.tracks) {
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
      SceneVehicle v;
      v.id = id;
      v.state = tr.states[k];
      v.lane = tr.lane;
      by_tick[std::llround(tr.times[k] / ds.dt)].push_back(v);
    }
  }
  std::vector<Scene> out;
  for (const auto& [tick, present] : by_tick) {
    if (present.size() < 2) continue;
    auto scenes = situations_at(present, static_cast<double>(tick) * ds.dt, map);
    for (auto& s : scenes) out.push_back(std::move(s));
  }
  return out;
}

unsigned relevance_clauses(VehicleId v, const Scene& scene, const LaneMap& map) {
  const auto subj_id = scene.subject();
  if (!subj_id) return 0;
  const auto& subj = scene.at(*subj_id);
  const auto& veh = scene.at(v);
  unsigned bits = 0;
  if (map.conflicting(subj.lane, veh.lane)) bits |= 1u;
  if (leading_vehicle(subj.id, scene, map) == v) bits |= 2u;
  for (const auto& o : scene.vehicles)
    if (o.id != subj.id && map.conflicting(subj.lane, o.lane) && leading_vehicle(o.id, scene, map) == v) bits |= 4u;
  return bits;
}

}  // namespace hocc
