#include "hocc/hypergame.hpp"
#include "hocc/pipeline.hpp"

#include "fixtures.hpp"
#include "support/testkit.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace hocc;

namespace {

struct Corpus {
  LaneMap map;
  RunConfig cfg;
  std::vector<Scene> situations;
  std::vector<Scene> injected;
};

const Corpus& tagging_corpus() {
  static const Corpus c = [] {
    Corpus c;
    c.map = fixtures::four_way();
    const auto ds = fixtures::snapshot_dataset(fixtures::tagging_on_layouts(c.map, 8, 1, 1, fixtures::tagging_on_ranges()));
    c.situations = extract_stage(ds, c.map, c.cfg);
    c.injected = inject_stage(c.situations, c.map, c.cfg.injection_config(SpeedSampler::from_dataset(ds)), c.cfg);
    return c;
  }();
  return c;
}

bool same_plan(const std::vector<Trajectory>& a, const std::vector<Trajectory>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].vehicle != b[i].vehicle || a[i].samples != b[i].samples) return false;
  return true;
}

bool contains(const std::vector<VehicleId>& v, VehicleId id) { return std::find(v.begin(), v.end(), id) != v.end(); }

}  // namespace

TEST(Hypergame, NoOcclusionCollapsesToResolvedGame) {
  const auto map = fixtures::four_way();
  const RunConfig cfg;
  const auto ds = fixtures::snapshot_dataset(fixtures::tagging_on_layouts(map, 20, 5));
  int checked = 0;
  for (const auto& s : extract_stage(ds, map, cfg)) {
    const auto report = occlusion_indicator(s, cfg.ray_budget());
    if (report.any_occlusion()) continue;
    ++checked;
    const auto h = build_hypergame(s, report, map, cfg.hypergame_params());
    for (const auto& v : s.vehicles) {
      EXPECT_EQ(h.visible.at(v.id), s.ids());
      EXPECT_EQ(h.views.at(v.id), h.resolved_game);
    }
    const auto d = compute_dor(h);
    EXPECT_EQ(d.dor, 0.0);
    EXPECT_TRUE(same_plan(d.naive_plan, d.resolved_plan));
    EXPECT_FALSE(classify_occ(h, d, cfg.theta, map).has_value());
  }
  EXPECT_GE(checked, 10);
}

TEST(HypergameProperty, ViewsDropExactlyTheOccluded) {
  const auto& c = tagging_corpus();
  ASSERT_FALSE(c.injected.empty());
  int mutual = 0, checked = 0;
  const auto budget = c.cfg.ray_budget();
  for (std::size_t n = 0; n < c.injected.size(); n += 3) {
    const auto& s = c.injected[n];
    const auto report = occlusion_indicator(s, budget);
    const auto h = build_hypergame(s, report, c.map, c.cfg.hypergame_params());
    ++checked;
    for (const auto& i : s.vehicles) {
      const auto& vis = h.visible.at(i.id);
      EXPECT_TRUE(contains(vis, i.id));
      EXPECT_EQ(h.views.at(i.id)->player_count(), vis.size());
      for (const auto& j : s.vehicles) {
        if (j.id == i.id) continue;
        const auto* pv = report.find(i.id, j.id);
        ASSERT_NE(pv, nullptr);
        EXPECT_EQ(!contains(vis, j.id), pv->occluded) << s.id << " " << i.id << "->" << j.id;
        if (!contains(vis, j.id)) EXPECT_TRUE(pv->occluder.has_value());
      }
    }
    const auto subject = *s.subject();
    for (const auto& j : s.vehicles)
      if (j.role == Role::relevant && !contains(h.visible.at(subject), j.id) && !contains(h.visible.at(j.id), subject))
        ++mutual;
    const auto d = compute_dor(h);
    EXPECT_EQ(d.dor, d.s_resolved - d.s_naive);
  }
  EXPECT_GE(checked, 20);
  EXPECT_GE(mutual, 1);
}

TEST(Hypergame, OneWayOcclusion) {
  // A leader ahead of the turner hides the oncoming car from it, while the
  // oncoming car still sees past the leader's edge.
  const auto map = fixtures::four_way();
  const int turner = fixtures::lane_id(fixtures::Approach::south, TurnType::left);
  const int oncoming = fixtures::lane_id(fixtures::Approach::north, TurnType::through);
  const double s1 = map.lane(turner).project({1.75, -13.5}).s;
  const auto s = testkit::scene_of({fixtures::on_lane(map, 1, turner, s1, 7),
                                    fixtures::on_lane(map, 2, oncoming, fixtures::crossing_s(map, oncoming, turner) - 20, 12),
                                    fixtures::on_lane(map, 3, turner, 78.5, 7)});
  ASSERT_FALSE(check_scene(s).has_value());
  const RayBudget budget;
  const auto a = testkit::oracle_pair(s, 1, 2, budget);
  const auto b = testkit::oracle_pair(s, 2, 1, budget);
  ASSERT_FALSE(a.excluded);
  ASSERT_FALSE(b.excluded);
  EXPECT_TRUE(a.occluded);
  EXPECT_FALSE(b.occluded);
  const auto report = occlusion_indicator(s, budget);
  EXPECT_TRUE(report.indicator(1, 3, 2));
  EXPECT_FALSE(report.occluded(2, 1));
  const auto h = build_hypergame(s, report, map);
  EXPECT_FALSE(contains(h.visible.at(1), 2));
  EXPECT_TRUE(contains(h.visible.at(2), 1));
  EXPECT_EQ(h.views.at(2), h.resolved_game);
  EXPECT_EQ(h.views.at(1)->player_count(), 2u);
}

TEST(Hypergame, OcclusionWithoutRisk) {
  // Occlusion alone does not imply collision: some occluded scenes keep the
  // resolved outcome.
  const auto& c = tagging_corpus();
  int occluded_zero = 0;
  for (std::size_t n = 0; n < c.injected.size() && occluded_zero == 0; ++n) {
    const auto& s = c.injected[n];
    const auto report = occlusion_indicator(s, c.cfg.ray_budget());
    if (!report.any_occlusion()) continue;
    const auto d = compute_dor(build_hypergame(s, report, c.map, c.cfg.hypergame_params()));
    if (d.dor == 0.0) ++occluded_zero;
  }
  EXPECT_GE(occluded_zero, 1);
}

TEST(Hypergame, TaggingOnRecord) {
  const auto& c = tagging_corpus();
  const auto out = validate_stage(c.injected, c.map, c.cfg);
  ASSERT_FALSE(out.records.empty());
  bool tagging = false;
  for (const auto& r : out.records) {
    EXPECT_GE(r.dor_result.dor, c.cfg.theta);
    EXPECT_GT(r.dor_result.dor, 0.0);
    EXPECT_LE(r.dor_result.s_naive, 0.0);
    EXPECT_EQ(r.dor_result.dor, r.dor_result.s_resolved - r.dor_result.s_naive);
    EXPECT_TRUE(resolution_check(r, c.cfg.ray_budget(), c.cfg.motion_params()).retain);
    if (!r.tagging_on) continue;
    tagging = true;
    // The layout pair: turner 2k+1 and oncoming 2k+2, hidden by the OV.
    const auto lo = std::min(r.impact.a, r.impact.b), hi = std::max(r.impact.a, r.impact.b);
    EXPECT_EQ(lo % 2, 1);
    EXPECT_EQ(hi, lo + 1);
    ASSERT_TRUE(r.occluder.has_value());
    EXPECT_EQ(r.scene.at(*r.occluder).role, Role::injected_ov);
  }
  EXPECT_TRUE(tagging);
}

TEST(Classify, ZeroRiskAndNearMissAreNotRecords) {
  const auto& c = tagging_corpus();
  const auto& s = c.situations.front();
  const auto h = build_hypergame(s, occlusion_indicator(s, c.cfg.ray_budget()), c.map, c.cfg.hypergame_params());
  DorResult d = compute_dor(h);
  d.dor = 0;
  EXPECT_FALSE(classify_occ(h, d, 2.0, c.map).has_value());
  d.dor = 3.0;
  d.s_naive = 0.2;
  EXPECT_FALSE(classify_occ(h, d, 2.0, c.map).has_value());
}

TEST(Classify, ThresholdAboveDorRejects) {
  const auto& c = tagging_corpus();
  const auto out = validate_stage(c.injected, c.map, c.cfg);
  ASSERT_FALSE(out.records.empty());
  const auto& r = out.records.front();
  const auto h = build_hypergame(r.scene, occlusion_indicator(r.scene, c.cfg.ray_budget()), c.map,
                                 c.cfg.hypergame_params());
  const auto d = compute_dor(h);
  EXPECT_EQ(d.dor, r.dor_result.dor);
  EXPECT_TRUE(classify_occ(h, d, d.dor, c.map).has_value());
  EXPECT_FALSE(classify_occ(h, d, d.dor + 1.0, c.map).has_value());
}

TEST(Resolution, EarlyResolutionIsDropped) {
  // Visible 3 s before impact at 12 m/s: 12 m of braking against 35.4 m.
  const auto rec = testkit::crossing_record(12, 0);
  const auto r = resolution_check(rec, RayBudget{});
  EXPECT_TRUE(r.resolved_before_impact);
  EXPECT_DOUBLE_EQ(r.resolution_time, 0.0);
  EXPECT_DOUBLE_EQ(r.resolution_to_impact, 3.0);
  EXPECT_FALSE(r.retain);
}

TEST(Resolution, LateResolutionIsRetained) {
  // Visible 0.4 s before impact: 4.2 m left, 12 m needed.
  const auto rec = testkit::crossing_record(12, 26);
  const auto r = resolution_check(rec, RayBudget{});
  EXPECT_TRUE(r.resolved_before_impact);
  EXPECT_NEAR(r.resolution_time, 2.6, 1e-9);
  EXPECT_NEAR(r.resolution_to_impact, 0.4, 1e-9);
  EXPECT_TRUE(r.retain);
}

TEST(Resolution, NeverResolvedIsRetained) {
  auto rec = testkit::crossing_record(12, std::nullopt);
  const auto r = resolution_check(rec, RayBudget{});
  EXPECT_FALSE(r.resolved_before_impact);
  EXPECT_DOUBLE_EQ(r.resolution_to_impact, 0.0);
  EXPECT_TRUE(r.retain);
  EXPECT_TRUE(apply_resolution_check(rec, RayBudget{}));
  EXPECT_DOUBLE_EQ(rec.resolution_time, 3.0);
}

TEST(SeverityProperty, FasterApproachNeverSoftensImpact) {
  // Each record's naive strategies are held fixed and replanned from initial
  // states where both colliding vehicles start faster.
  const auto& c = tagging_corpus();
  const auto out = validate_stage(c.injected, c.map, c.cfg);
  ASSERT_FALSE(out.records.empty());
  const auto motion = c.cfg.motion_params();
  int compared = 0;
  for (const auto& r : out.records) {
    const auto& plan = r.dor_result.naive_plan;
    std::vector<std::size_t> index;
    for (const auto& t : plan) {
      const auto ts = generate_trajectories(t.vehicle, r.scene, t.maneuver, c.map, motion);
      const auto it = std::find_if(ts.begin(), ts.end(), [&](const Trajectory& x) { return x.samples == t.samples; });
      ASSERT_NE(it, ts.end());
      index.push_back(static_cast<std::size_t>(it - ts.begin()));
    }
    const auto pair = std::minmax(r.impact.a, r.impact.b);
    double last = r.impact.relative_speed;
    for (double f : {1.05, 1.1, 1.15, 1.2, 1.25}) {
      Scene s = r.scene;
      for (auto& v : s.vehicles)
        if (v.id == r.impact.a || v.id == r.impact.b) {
          v.state.vx *= f;
          v.state.vy *= f;
        }
      std::vector<Trajectory> scaled;
      for (std::size_t i = 0; i < plan.size(); ++i) {
        const auto ts = generate_trajectories(plan[i].vehicle, s, plan[i].maneuver, c.map, motion);
        if (index[i] < ts.size()) scaled.push_back(ts[index[i]]);
      }
      if (scaled.size() != plan.size()) break;
      const auto roll = forward_simulate(s, plan_pointers(scaled), motion.horizon, std::nullopt, motion);
      if (!roll.collision || std::minmax(roll.collision->a, roll.collision->b) != pair) break;
      const auto& frame = roll.frames.back();
      const double rel = (frame.at(pair.first).state.world_velocity() - frame.at(pair.second).state.world_velocity()).norm();
      ++compared;
      EXPECT_GE(rel, last - 1e-9) << r.scene.id << " factor " << f;
      last = rel;
    }
  }
  EXPECT_GE(compared, 1);
}
