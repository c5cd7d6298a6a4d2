#include "hocc/hypergame.hpp"

#include "hocc/error.hpp"
#include "hocc/situations.hpp"

#include <algorithm>
#include <cmath>

namespace hocc {

HypergameL1 build_hypergame(const Scene& scene, const VisibilityReport& report, const LaneMap& map,
                            const HypergameParams& params) {
  if (scene.vehicles.size() < 2) throw Error("build_hypergame: scene " + scene.id + " has fewer than two vehicles");
  HypergameL1 h;
  h.base_scene = scene;
  h.report = report;
  h.params = params;
  const auto all = scene.ids();
  h.resolved_game = std::make_shared<const GameView>(build_game(scene, map, params.utility, params.motion, params.limits));

  std::map<std::vector<VehicleId>, std::shared_ptr<const GameView>> cache{{all, h.resolved_game}};
  for (VehicleId i : all) {
    std::vector<VehicleId> seen;
    for (VehicleId j : all)
      if (j == i || !report.occluded(i, j)) seen.push_back(j);
    auto it = cache.find(seen);
    if (it == cache.end()) {
      auto g = build_game(scene.subset(seen), map, params.utility, params.motion, params.limits);
      it = cache.emplace(seen, std::make_shared<const GameView>(std::move(g))).first;
    }
    h.views[i] = it->second;
    h.visible[i] = std::move(seen);
  }
  return h;
}

std::vector<const Trajectory*> plan_pointers(const std::vector<Trajectory>& plan) {
  std::vector<const Trajectory*> out;
  out.reserve(plan.size());
  for (const auto& t : plan) out.push_back(&t);
  return out;
}

DorResult compute_dor(const HypergameL1& h) {
  const double gamma = h.params.utility.gamma;
  DorResult r;

  const GameView& g0 = *h.resolved_game;
  r.resolved_profile = solve_nash_maneuvers(g0, gamma);
  for (std::size_t p = 0; p < g0.player_count(); ++p) {
    const auto& c = r.resolved_profile.choices[p];
    r.resolved_plan.push_back(g0.trajectory(p, c.maneuver, c.trajectory));
  }

  std::map<const GameView*, StrategyProfile> solved{{&g0, r.resolved_profile}};
  r.naive_profile.diagnostics.tie_break = "assembled";
  for (const auto& [vid, view] : h.views) {
    auto it = solved.find(view.get());
    if (it == solved.end()) it = solved.emplace(view.get(), solve_nash_maneuvers(*view, gamma)).first;
    const StrategyProfile& s = it->second;
    const PlayerChoice* c = s.find(vid);
    const int p = view->player_index(vid);
    r.naive_profile.choices.push_back(*c);
    r.naive_profile.diagnostics.equilibrium_count += s.diagnostics.equilibrium_count;
    r.naive_profile.diagnostics.fallback = r.naive_profile.diagnostics.fallback || s.diagnostics.fallback;
    r.naive_plan.push_back(view->trajectory(static_cast<std::size_t>(p), c->maneuver, c->trajectory));
  }

  r.s_resolved = surrogate_s(joint_gap_profiles(plan_pointers(r.resolved_plan)));
  r.s_naive = surrogate_s(joint_gap_profiles(plan_pointers(r.naive_plan)));
  r.dor = r.s_resolved - r.s_naive;
  return r;
}

namespace {

bool tagging_on(const HypergameL1& h, VehicleId naive, VehicleId other, const LaneMap& map) {
  const auto* pv = h.report.find(naive, other);
  if (!pv || !pv->occluded || !pv->occluder) return false;
  const auto leader = leading_vehicle(naive, h.base_scene, map);
  return leader && *leader == *pv->occluder && h.base_scene.at(*leader).lane == h.base_scene.at(naive).lane;
}

}  // namespace

std::optional<OccRecord> classify_occ(const HypergameL1& h, const DorResult& dor, double theta, const LaneMap& map) {
  if (!(dor.dor >= theta) || dor.s_naive > 0) return std::nullopt;
  const auto& motion = h.params.motion;
  const auto rollout = forward_simulate(h.base_scene, plan_pointers(dor.naive_plan), motion.horizon, std::nullopt, motion);
  if (!rollout.collision) return std::nullopt;
  const auto& col = *rollout.collision;
  const Scene& frame = rollout.frames.back();

  OccRecord rec;
  rec.scene = h.base_scene;
  rec.visible = h.visible;
  rec.dor_result = dor;
  rec.impact.frame = col.frame;
  rec.impact.time = static_cast<double>(col.frame) * motion.dt;
  rec.impact.a = col.a;
  rec.impact.b = col.b;
  rec.impact.clearance = col.clearance;
  rec.impact.vehicles = frame.vehicles;
  const auto& va = frame.at(col.a);
  const auto& vb = frame.at(col.b);
  rec.impact.relative_speed = (va.state.world_velocity() - vb.state.world_velocity()).norm();
  rec.severity = severity_class(rec.impact.relative_speed);
  rec.collision_type = classify_collision(va.box(), vb.box());
  rec.tagging_on = tagging_on(h, col.a, col.b, map) || tagging_on(h, col.b, col.a, map);
  for (const auto& [obs, tgt] : {std::pair{col.a, col.b}, std::pair{col.b, col.a}}) {
    const auto* pv = h.report.find(obs, tgt);
    if (!rec.occluder && pv && pv->occluded) rec.occluder = pv->occluder;
  }
  rec.resolution_time = rec.impact.time;
  return rec;
}

ResolutionOutcome resolution_check(const OccRecord& record, const RayBudget& budget, const MotionParams& motion) {
  const auto plan = plan_pointers(record.dor_result.naive_plan);
  const auto rollout = forward_simulate(record.scene, plan, record.impact.time, std::nullopt, motion);
  const std::vector<VehicleId> pair{record.impact.a, record.impact.b};

  ResolutionOutcome out;
  out.resolution_time = record.impact.time;
  for (std::size_t k = 0; k < rollout.frames.size() && k < record.impact.frame; ++k) {
    const auto report = occlusion_indicator(rollout.frames[k], budget, &pair);
    if (report.occluded(pair[0], pair[1]) || report.occluded(pair[1], pair[0])) continue;
    out.resolved_before_impact = true;
    out.resolution_time = static_cast<double>(k) * motion.dt;
    const EmergencyBrake brake{pair, out.resolution_time, motion.brake_decel};
    const auto braked = forward_simulate(record.scene, plan, motion.horizon, brake, motion);
    out.retain = braked.collision.has_value();
    break;
  }
  out.resolution_to_impact = record.impact.time - out.resolution_time;
  return out;
}

bool apply_resolution_check(OccRecord& record, const RayBudget& budget, const MotionParams& motion) {
  const auto r = resolution_check(record, budget, motion);
  record.resolution_time = r.resolution_time;
  record.resolution_to_impact = r.resolution_to_impact;
  record.resolved_before_impact = r.resolved_before_impact;
  return r.retain;
}

}  // namespace hocc
