#include "hocc/generator.hpp"

#include "hocc/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hocc {

SpeedSampler SpeedSampler::from_dataset(const TrackDataset& ds) {
  std::map<int, std::vector<double>> counts;
  for (const auto& [id, tr] : ds.tracks) {
    auto& c = counts[tr.lane];
    for (const auto& s : tr.states) {
      const auto bin = static_cast<std::size_t>(std::max(0.0, std::floor(s.speed())));
      if (c.size() <= bin) c.resize(bin + 1, 0.0);
      c[bin] += 1.0;
    }
  }
  SpeedSampler out;
  for (auto& [lane, c] : counts) {
    double total = 0;
    for (double x : c) total += x;
    if (total <= 0) continue;
    for (double& x : c) x /= total;
    out.lanes[lane].probabilities = std::move(c);
  }
  return out;
}

double SpeedSampler::sample(int lane, const LaneMap& map, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto it = lanes.find(lane);
  if (it == lanes.end() || it->second.probabilities.empty()) return unit(rng) * map.lane(lane).speed_limit();
  const auto& p = it->second.probabilities;
  const double u = unit(rng);
  double acc = 0;
  std::size_t bin = p.size() - 1;
  for (std::size_t b = 0; b < p.size(); ++b) {
    acc += p[b];
    if (u < acc) {
      bin = b;
      break;
    }
  }
  return static_cast<double>(bin) + unit(rng);
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t scene_index, std::uint64_t candidate_index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ scene_index) ^ candidate_index);
}

std::vector<CandidateOV> sample_candidates(const Scene& scene, const LaneMap& map, const InjectionConfig& cfg,
                                           std::uint64_t scene_index) {
  if (!(cfg.spacing > 0)) throw Error("injection spacing must be positive");
  Vec2d lo = Vec2d::Constant(-std::numeric_limits<double>::infinity());
  Vec2d hi = Vec2d::Constant(std::numeric_limits<double>::infinity());
  if (!scene.vehicles.empty()) {
    lo = Vec2d::Constant(std::numeric_limits<double>::infinity());
    hi = -lo;
    for (const auto& v : scene.vehicles)
      for (const auto& c : v.box().corners()) {
        lo = lo.cwiseMin(c);
        hi = hi.cwiseMax(c);
      }
    lo.array() -= cfg.margin;
    hi.array() += cfg.margin;
  }

  std::vector<CandidateOV> out;
  int index = 0;
  for (const auto& lane : map.lanes()) {
    const auto steps = static_cast<long>(std::floor(lane.length() / cfg.spacing + 1e-9));
    for (long k = 0; k <= steps; ++k) {
      const double s = static_cast<double>(k) * cfg.spacing;
      const Vec2d p = lane.position(s);
      if ((p.array() < lo.array()).any() || (p.array() > hi.array()).any()) continue;
      VehicleState st;
      st.x = p.x();
      st.y = p.y();
      st.yaw = lane.heading(s);
      const auto box = cfg.footprint.box(st);
      const bool clear = std::all_of(scene.vehicles.begin(), scene.vehicles.end(), [&](const SceneVehicle& v) {
        return signed_clearance(box, v.box()) >= cfg.min_gap;
      });
      if (!clear) continue;
      CandidateOV c;
      c.index = index++;
      c.lane = lane.id();
      c.s = s;
      c.state = st;
      c.state.vy = cfg.speeds.sample(lane.id(), map,
                                     split_seed(cfg.seed, scene_index, static_cast<std::uint64_t>(c.index)));
      out.push_back(c);
    }
  }
  return out;
}

Scene inject(const Scene& scene, const CandidateOV& cand, const InjectionConfig& cfg) {
  Scene out = scene;
  VehicleId next = 1;
  for (const auto& v : scene.vehicles) next = std::max(next, v.id + 1);
  SceneVehicle ov;
  ov.id = next;
  ov.state = cand.state;
  ov.lane = cand.lane;
  ov.role = Role::injected_ov;
  ov.footprint = cfg.footprint;
  out.vehicles.push_back(ov);
  out.id = scene.id + "-o" + std::to_string(cand.index);
  out.provenance.source = scene.id;
  out.provenance.candidate = cand.index;
  out.provenance.seed = cfg.seed;
  return out;
}

bool candidate_occludes(const Scene& injected, VehicleId ov, const std::vector<VehicleId>& original,
                        const RayBudget& budget) {
  const auto report = occlusion_indicator(injected, budget, &original);
  for (const auto& [pair, vis] : report.pairs())
    if (vis.occluded && vis.occluder == ov) return true;
  return false;
}

std::vector<Scene> search_scene(const Scene& scene, std::uint64_t scene_index, const LaneMap& map,
                                const InjectionConfig& cfg, const RayBudget& budget) {
  std::vector<Scene> out;
  if (occlusion_indicator(scene, budget).any_occlusion()) out.push_back(scene);
  const auto original = scene.ids();
  for (const auto& cand : sample_candidates(scene, map, cfg, scene_index)) {
    Scene s = inject(scene, cand, cfg);
    if (candidate_occludes(s, s.vehicles.back().id, original, budget)) out.push_back(std::move(s));
  }
  return out;
}

std::vector<Scene> occlusion_guided_search(const std::vector<Scene>& scenes, const LaneMap& map,
                                           const InjectionConfig& cfg, const RayBudget& budget) {
  std::vector<Scene> out;
  for (std::size_t i = 0; i < scenes.size(); ++i)
    for (auto& s : search_scene(scenes[i], i, map, cfg, budget)) out.push_back(std::move(s));
  return out;
}

std::string speed_sampler_to_json(const SpeedSampler& s) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [lane, h] : s.lanes) j[std::to_string(lane)] = {{"bin_width", 1.0}, {"probabilities", h.probabilities}};
  return j.dump();
}

}  // namespace hocc
