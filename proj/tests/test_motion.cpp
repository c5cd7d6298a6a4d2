#include "hocc/error.hpp"
#include "hocc/motion.hpp"
#include "hocc/situations.hpp"

#include "fixtures.hpp"
#include "support/testkit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace hocc;
using testkit::constant_velocity;
using testkit::free_vehicle;
using testkit::scene_of;

namespace {

Scene on_straight(double x, double speed) {
  auto v = free_vehicle(1, x, 0, 0, speed);
  v.lane = 1;
  return scene_of({v});
}

const Trajectory& with_target(const std::vector<Trajectory>& ts, double target) {
  for (const auto& t : ts)
    if (std::abs(t.target_speed - target) < 1e-9) return t;
  throw Error("no trajectory with the requested target speed");
}

}  // namespace

TEST(Trajectories, StationaryWaitHolds) {
  const auto map = testkit::straight_map();
  const auto s = on_straight(-20, 0);
  const auto ts = generate_trajectories(1, s, {ManeuverKind::wait, 1}, map);
  ASSERT_FALSE(ts.empty());
  for (const auto& t : ts) {
    ASSERT_EQ(t.samples.size(), 61u);
    for (const auto& x : t.samples) {
      EXPECT_NEAR(x.x, -20, 1e-9);
      EXPECT_NEAR(x.y, 0, 1e-9);
    }
  }
}

TEST(Trajectories, TrackSpeedAtLimitCoversSixtyMeters) {
  const auto map = testkit::straight_map(10);
  const auto ts = generate_trajectories(1, on_straight(-50, 10), {ManeuverKind::track_speed, 1}, map);
  ASSERT_EQ(ts.size(), 3u);
  const auto& t = with_target(ts, 10);
  EXPECT_NEAR(t.samples.back().x - t.samples.front().x, 60, 0.5);
  EXPECT_NEAR(t.progress, 60, 0.5);
}

TEST(Trajectories, DecelerateToStopAtThreeSeconds) {
  // Constant-deceleration cubic: s(3) = v0 * 3 / 2.
  const auto map = testkit::straight_map(10);
  const auto ts = generate_trajectories(1, on_straight(-50, 10), {ManeuverKind::decelerate_to_stop, 1}, map);
  ASSERT_EQ(ts.size(), 3u);
  const auto& t = ts.front();
  EXPECT_NEAR(t.samples[30].x - t.samples[0].x, 15.0, 1e-6);
  EXPECT_NEAR(t.samples[30].vy, 0.0, 1e-9);
  EXPECT_NEAR(t.samples[60].x, t.samples[30].x, 1e-9);
}

TEST(Trajectories, InfeasibleDecelerationIsDropped) {
  // Stopping from 22 m/s takes 7.3, 4.9 and 3.7 m/s^2 over 3, 4.5 and 6 s;
  // a 5 m/s^2 cap drops the first.
  const auto map = testkit::straight_map(22);
  MotionParams p;
  p.max_decel = 5;
  const auto ts = generate_trajectories(1, on_straight(-90, 22), {ManeuverKind::decelerate_to_stop, 1}, map, p);
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_NEAR(ts[0].samples[45].vy, 0, 1e-9);
  EXPECT_NEAR(ts[1].samples[60].vy, 0, 1e-9);
}

TEST(Trajectories, FollowLeadNeedsALeader) {
  const auto map = testkit::straight_map(10);
  EXPECT_TRUE(generate_trajectories(1, on_straight(-50, 10), {ManeuverKind::follow_lead, 1}, map).empty());
}

TEST(Maneuvers, AdmissibleByTurnType) {
  const auto map = fixtures::four_way();
  const auto turner = fixtures::on_lane(map, 1, fixtures::lane_id(fixtures::Approach::south, TurnType::left), 60, 5);
  const auto through = fixtures::on_lane(map, 2, fixtures::lane_id(fixtures::Approach::north, TurnType::through), 60, 5);
  auto kinds = [](const std::vector<Maneuver>& ms) {
    std::vector<ManeuverKind> k;
    for (const auto& m : ms) k.push_back(m.kind);
    return k;
  };
  EXPECT_EQ(kinds(admissible_maneuvers(turner, map, false)),
            (std::vector<ManeuverKind>{ManeuverKind::proceed, ManeuverKind::wait}));
  EXPECT_EQ(kinds(admissible_maneuvers(turner, map, true)),
            (std::vector<ManeuverKind>{ManeuverKind::proceed, ManeuverKind::wait, ManeuverKind::follow_lead}));
  EXPECT_EQ(kinds(admissible_maneuvers(through, map, true)),
            (std::vector<ManeuverKind>{ManeuverKind::track_speed, ManeuverKind::decelerate_to_stop,
                                       ManeuverKind::follow_lead}));
}

TEST(TrajectoryProperty, StartStateSmoothnessAndLaneBound) {
  // Smoothness is checked on a 0.01 s resampling: at 0.1 s a central
  // difference carries about a * dt / 4 of error at every acceleration step
  // (stop points, straight-to-arc joins) even for continuous velocity.
  const auto map = fixtures::four_way();
  testkit::Rng rng(41);
  const MotionParams mp;
  MotionParams fine = mp;
  fine.dt = 0.01;
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<SceneVehicle> vs;
    for (int tries = 0; tries < 30 && vs.size() < 4; ++tries) {
      const auto& l = map.lanes()[static_cast<std::size_t>(rng.integer(0, static_cast<int>(map.lanes().size()) - 1))];
      auto v = fixtures::on_lane(map, static_cast<VehicleId>(vs.size() + 1), l.id(), rng.uniform(45, 100),
                                 rng.uniform(0, l.speed_limit()));
      const bool clear = std::all_of(vs.begin(), vs.end(),
                                     [&](const SceneVehicle& o) { return signed_clearance(o.box(), v.box()) > 0.5; });
      if (clear) vs.push_back(v);
    }
    const auto scene = scene_of(vs);
    for (const auto& v : scene.vehicles) {
      const bool leader = leading_vehicle(v.id, scene, map).has_value();
      for (const auto& m : admissible_maneuvers(v, map, leader)) {
        for (const auto& t : generate_trajectories(v.id, scene, m, map, mp)) {
          ++checked;
          ASSERT_EQ(static_cast<int>(t.samples.size()), mp.sample_count());
          const auto& s0 = t.samples.front();
          EXPECT_NEAR(s0.x, v.state.x, 1e-6);
          EXPECT_NEAR(s0.y, v.state.y, 1e-6);
          EXPECT_NEAR(s0.vx, v.state.vx, 1e-6);
          EXPECT_NEAR(s0.vy, v.state.vy, 1e-6);
          if (m.kind == ManeuverKind::wait) continue;
          for (const auto& x : t.samples) EXPECT_LE(map.lane(m.lane).project(x.position()).distance, 1.5);
        }
        for (const auto& t : generate_trajectories(v.id, scene, m, map, fine)) {
          for (std::size_t k = 1; k + 1 < t.samples.size(); ++k) {
            const Vec2d fd = (t.samples[k + 1].position() - t.samples[k - 1].position()) / (2 * fine.dt);
            EXPECT_NEAR((fd - t.samples[k].world_velocity()).norm(), 0.0, 0.1)
                << to_string(m.kind) << " vehicle " << v.id << " sample " << k << " target " << t.target_speed;
          }
        }
      }
    }
  }
  EXPECT_GE(checked, 500);
}

TEST(Gaps, IdenticalTrajectoriesOverlapByWidth) {
  const MotionParams mp;
  const auto a = constant_velocity(1, {0, 0}, 0, 5, mp);
  const auto b = constant_velocity(2, {0, 0}, 0, 5, mp);
  for (double c : gap_profile(a, b).clearance) EXPECT_NEAR(c, -1.8, 1e-9);
}

TEST(Gaps, ParallelLanesFourMetersApart) {
  const MotionParams mp;
  const auto a = constant_velocity(1, {0, 0}, 0, 5, mp);
  const auto b = constant_velocity(2, {0, 4}, 0, 5, mp);
  const auto g = gap_profile(a, b);
  for (double c : g.clearance) EXPECT_NEAR(c, 2.2, 1e-9);
  EXPECT_NEAR(surrogate_s({g}), 2.2, 1e-9);
}

TEST(Gaps, CrossingPathsMeetAtThreeSeconds) {
  const MotionParams mp;
  const auto a = constant_velocity(1, {-30, 0}, 0, 10, mp);
  const auto b = constant_velocity(2, {0, -30}, std::numbers::pi / 2, 10, mp);
  const auto g = gap_profile(a, b);
  EXPECT_LE(g.clearance[30], 0.0);
  EXPECT_LE(g.min(), 0.0);
  const auto c = constant_velocity(3, {0, 40}, 0, 10, mp);
  EXPECT_LE(surrogate_s(joint_gap_profiles({&a, &b, &c})), 0.0);
}

TEST(Gaps, SurrogateIsTheMinimum) {
  GapProfile p{1, 2, {3.0, 2.2, 2.5}};
  GapProfile q{1, 3, {1.0, -0.3, 0.4}};
  EXPECT_DOUBLE_EQ(surrogate_s({p}), 2.2);
  EXPECT_DOUBLE_EQ(surrogate_s({p, q}), -0.3);
}

TEST(GapProperty, SymmetricAndMonotone) {
  testkit::Rng rng(42);
  const MotionParams mp;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Trajectory> ts;
    for (int i = 0; i < 3; ++i)
      ts.push_back(constant_velocity(i + 1, {rng.uniform(-30, 30), rng.uniform(-30, 30)},
                                     rng.uniform(-3.14, 3.14), rng.uniform(0, 12), mp));
    const auto ab = gap_profile(ts[0], ts[1]);
    const auto ba = gap_profile(ts[1], ts[0]);
    ASSERT_EQ(ab.clearance.size(), ba.clearance.size());
    for (std::size_t k = 0; k < ab.clearance.size(); ++k) EXPECT_DOUBLE_EQ(ab.clearance[k], ba.clearance[k]);
    const auto ac = gap_profile(ts[0], ts[2]);
    EXPECT_LE(surrogate_s({ab, ac}), surrogate_s({ab}));
  }
}

TEST(GapProperty, SeparatingAxisAgreesWithPointSampling) {
  testkit::Rng rng(43);
  auto sample_inside = [](const OrientedBoxd& a, const OrientedBoxd& b) {
    // Boundary and interior samples of `a` tested for containment in `b`.
    constexpr int n = 60;
    const auto c = a.corners();
    for (int e = 0; e < 4; ++e)
      for (int i = 0; i <= n; ++i)
        if (b.contains(c[e] + (c[(e + 1) % 4] - c[e]) * (static_cast<double>(i) / n))) return true;
    return b.contains(a.center);
  };
  int overlaps_seen = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = make_box<double>({rng.uniform(-4, 4), rng.uniform(-4, 4)}, rng.uniform(-3.2, 3.2), 4.1, 1.8);
    const auto b = make_box<double>({rng.uniform(-4, 4), rng.uniform(-4, 4)}, rng.uniform(-3.2, 3.2), 4.1, 1.8);
    const double clr = signed_clearance(a, b);
    EXPECT_NEAR(clr, signed_clearance(b, a), 1e-12);
    const bool sampled = sample_inside(a, b) || sample_inside(b, a);
    // Sampling resolution along an edge is 4.1 / 60 m.
    if (sampled) EXPECT_LE(clr, 0.0);
    if (clr < -0.07) EXPECT_TRUE(sampled) << "clearance " << clr;
    overlaps_seen += clr <= 0;
  }
  EXPECT_GE(overlaps_seen, 100);
}

TEST(Rollout, NoInterventionReplaysSamples) {
  const MotionParams mp;
  const auto scene = scene_of({free_vehicle(1, 0, 0, 0, 5), free_vehicle(2, 0, 10, 0, 5)});
  const auto a = constant_velocity(1, {0, 0}, 0, 5, mp);
  const auto b = constant_velocity(2, {0, 10}, 0, 5, mp);
  const auto r = forward_simulate(scene, {&a, &b}, mp.horizon, std::nullopt, mp);
  ASSERT_EQ(r.frames.size(), 61u);
  EXPECT_FALSE(r.collision);
  for (std::size_t k = 0; k < r.frames.size(); ++k) {
    EXPECT_EQ(r.frames[k].at(1).state, a.samples[k]);
    EXPECT_EQ(r.frames[k].at(2).state, b.samples[k]);
  }
}

TEST(Rollout, EmergencyBrakeStopsAfterTwelveMeters) {
  const MotionParams mp;
  const auto scene = scene_of({free_vehicle(1, 0, 0, 0, 12)});
  const auto a = constant_velocity(1, {0, 0}, 0, 12, mp);
  const auto r = forward_simulate(scene, {&a}, mp.horizon, EmergencyBrake{{1}, 0.0, 6.0}, mp);
  ASSERT_EQ(r.frames.size(), 61u);
  // v t - a t^2 / 2 while moving, 12 m once stopped at t = 2 s.
  EXPECT_NEAR(r.frames[10].at(1).state.x, 12 * 1.0 - 3 * 1.0, 1e-9);
  EXPECT_NEAR(r.frames[20].at(1).state.x, 12.0, 1e-9);
  EXPECT_NEAR(r.frames[20].at(1).state.vy, 0.0, 1e-9);
  EXPECT_NEAR(r.frames[60].at(1).state.x, 12.0, 1e-9);
}

TEST(Rollout, BrakingBeforeTheConflictZone) {
  // A heads east, B north; both fronts reach the crossing square 0.01 m after
  // the 2.5 s sample, so the first overlapping frame is at 2.6 s.
  // A brakes from 1 s: it stops short iff v^2 / (2 a) < front distance at 1 s.
  const MotionParams mp;
  for (double v : {6.0, 9.0, 12.0}) {
    const double entry = -0.9 - 2.05;  // A's center when its front touches B's lane
    const double x0 = entry - v * 2.5 - 0.01;
    const double y0 = x0;
    const auto scene = scene_of({free_vehicle(1, x0, 0, 0, v), free_vehicle(2, 0, y0, std::numbers::pi / 2, v)});
    const auto a = constant_velocity(1, {x0, 0}, 0, v, mp);
    const auto b = constant_velocity(2, {0, y0}, std::numbers::pi / 2, v, mp);
    const auto free_run = forward_simulate(scene, {&a, &b}, mp.horizon, std::nullopt, mp);
    ASSERT_TRUE(free_run.collision);
    EXPECT_NEAR(free_run.collision->time, 2.6, 1e-9);
    const auto braked = forward_simulate(scene, {&a, &b}, mp.horizon, EmergencyBrake{{1}, 1.0, 6.0}, mp);
    const double front_gap = v * 1.5 + 0.01;
    const bool stops_short = v * v / 12.0 < front_gap;
    EXPECT_EQ(!braked.collision.has_value(), stops_short) << "v = " << v;
  }
}

TEST(Rollout, MissingTrajectoryIsAnError) {
  const MotionParams mp;
  const auto scene = scene_of({free_vehicle(1, 0, 0, 0), free_vehicle(2, 0, 10, 0)});
  const auto a = constant_velocity(1, {0, 0}, 0, 5, mp);
  EXPECT_THROW(forward_simulate(scene, {&a}, 1.0), Error);
}

TEST(TrajectoryDump, CsvColumns) {
  const MotionParams mp;
  const auto a = constant_velocity(1, {0, 0}, 0, 5, mp);
  const auto csv = trajectories_to_csv({&a}, mp.dt);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "vehicle_id,k,t,x,y,vx,vy,yaw");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 62);
}
