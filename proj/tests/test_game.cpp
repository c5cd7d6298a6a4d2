#include "hocc/error.hpp"
#include "hocc/game.hpp"

#include "fixtures.hpp"
#include "support/testkit.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>

using namespace hocc;
using fixtures::Approach;

namespace {

/// Game with `shape[p][m]` trajectories for maneuver m of player p and all
/// utilities zero.
GameView shaped(const std::vector<std::vector<int>>& shape) {
  std::vector<PlayerActions> players;
  for (std::size_t p = 0; p < shape.size(); ++p) {
    PlayerActions pa;
    pa.vehicle = static_cast<VehicleId>(p + 1);
    for (std::size_t m = 0; m < shape[p].size(); ++m) {
      ManeuverActions ma;
      ma.maneuver.kind = m == 0 ? ManeuverKind::proceed : ManeuverKind::wait;
      ma.trajectories.resize(static_cast<std::size_t>(shape[p][m]));
      for (auto& t : ma.trajectories) t.vehicle = pa.vehicle;
      pa.maneuvers.push_back(std::move(ma));
    }
    players.push_back(std::move(pa));
  }
  return GameView(std::move(players));
}

std::vector<std::size_t> globals_of(const GameView& g, const StrategyProfile& s) {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < s.choices.size(); ++p)
    out.push_back(g.global_index(p, s.choices[p].maneuver, s.choices[p].trajectory));
  return out;
}

std::vector<std::size_t> maneuvers_of(const StrategyProfile& s) {
  std::vector<std::size_t> out;
  for (const auto& c : s.choices) out.push_back(c.maneuver);
  return out;
}

/// Visits every joint maneuver cell of `g`.
template <class F>
void for_each_maneuver_cell(const GameView& g, F&& f) {
  std::vector<std::size_t> m(g.player_count(), 0);
  while (true) {
    f(m);
    std::size_t i = m.size();
    while (i-- > 0) {
      if (++m[i] < g.players()[i].maneuvers.size()) break;
      m[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) return;
  }
}

}  // namespace

TEST(Utilities, SafetySigmoid) {
  const UtilityParams p;
  EXPECT_NEAR(safety_utility(p.sigmoid_midpoint, p), 0.0, 1e-12);
  EXPECT_NEAR(safety_utility(1e6, p), 1.0, 1e-12);
  EXPECT_NEAR(safety_utility(-1e6, p), -1.0, 1e-12);
  EXPECT_NEAR(safety_utility(p.sigmoid_midpoint + 1 / p.sigmoid_slope, p), 2 / (1 + std::exp(-1.0)) - 1, 1e-12);
  EXPECT_NEAR(safety_utility(p.sigmoid_midpoint + 1 / p.sigmoid_slope, p), 0.4621, 1e-4);
}

TEST(Utilities, ProgressClamp) {
  UtilityParams p;
  p.progress_norm = 132;
  EXPECT_NEAR(progress_utility(60.0, p), 0.4545, 1e-4);
  EXPECT_DOUBLE_EQ(progress_utility(0.0, p), 0.0);
  EXPECT_DOUBLE_EQ(progress_utility(132.0, p), 1.0);
  EXPECT_DOUBLE_EQ(progress_utility(500.0, p), 1.0);
  const MotionParams mp;
  EXPECT_DOUBLE_EQ(progress_utility(testkit::constant_velocity(1, {0, 0}, 0, 0, mp), p), 0.0);
}

TEST(Utilities, LexicographicSatisficing) {
  EXPECT_EQ(lex_compare({0.9, 0.2}, {0.8, 0.9}, 0.5), std::partial_ordering::less);
  EXPECT_EQ(lex_compare({0.3, 1.0}, {0.6, 0.0}, 0.5), std::partial_ordering::less);
  EXPECT_EQ(lex_compare({0.3, 0.4}, {0.3, 0.4}, 0.5), std::partial_ordering::equivalent);
}

TEST(UtilityProperty, Monotone) {
  testkit::Rng rng(51);
  const UtilityParams p;
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(-10, 10);
    const double b = a + rng.uniform(1e-3, 5);
    EXPECT_LT(safety_utility(a, p), safety_utility(b, p));
    const double x = rng.uniform(0, 200);
    EXPECT_LE(progress_utility(x, p), progress_utility(x + rng.uniform(0, 50), p));
  }
}

TEST(BuildGame, TwoTurnersMakeThirtySixCells) {
  const auto map = fixtures::four_way();
  const auto s = testkit::scene_of(
      {fixtures::on_lane(map, 1, fixtures::lane_id(Approach::south, TurnType::left), 30, 6),
       fixtures::on_lane(map, 2, fixtures::lane_id(Approach::north, TurnType::left), 30, 6)});
  const auto g = build_game(s, map, UtilityParams{});
  ASSERT_EQ(g.player_count(), 2u);
  for (const auto& p : g.players()) {
    ASSERT_EQ(p.maneuvers.size(), 2u);
    EXPECT_EQ(p.trajectory_count(), 6u);
  }
  EXPECT_EQ(g.cell_count(), 36u);
  for (std::size_t c = 0; c < g.cell_count(); ++c)
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_GE(g.utility(c, i).safety, -1.0);
      EXPECT_LE(g.utility(c, i).safety, 1.0);
    }
}

TEST(BuildGame, SoloViewIsPerfectlySafe) {
  const auto map = fixtures::four_way();
  const auto s = testkit::scene_of({fixtures::on_lane(map, 1, fixtures::lane_id(Approach::south, TurnType::left), 30, 6)});
  const UtilityParams up;
  const auto g = build_game(s, map, up);
  ASSERT_EQ(g.player_count(), 1u);
  for (std::size_t m = 0; m < g.players()[0].maneuvers.size(); ++m)
    for (std::size_t t = 0; t < g.players()[0].maneuvers[m].trajectories.size(); ++t) {
      const auto cell = g.cell_index({g.global_index(0, m, t)});
      EXPECT_DOUBLE_EQ(g.utility(cell, 0).safety, 1.0);
      EXPECT_DOUBLE_EQ(g.utility(cell, 0).progress, progress_utility(g.trajectory(0, m, t), up));
    }
}

TEST(BuildGame, LtapCrossingCellsAreUnsafe) {
  const auto map = fixtures::four_way();
  const int turner = fixtures::lane_id(Approach::south, TurnType::left);
  const int oncoming = fixtures::lane_id(Approach::north, TurnType::through);
  const double entry = map.lane(turner).project({1.75, -13.0}).s;
  const double c2 = fixtures::crossing_s(map, oncoming, turner);
  const auto s = testkit::scene_of({fixtures::on_lane(map, 1, turner, entry, 6),
                                    fixtures::on_lane(map, 2, oncoming, c2 - 25, 10),
                                    fixtures::on_lane(map, 3, oncoming, c2 - 12, 10)});
  const auto g = build_game(s, map, UtilityParams{});
  ASSERT_EQ(g.player_count(), 3u);
  // Proceeding subject against oncoming traffic holding its speed.
  bool unsafe = false;
  const auto& p0 = g.players()[0].maneuvers;
  const auto& p1 = g.players()[1].maneuvers;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    std::vector<std::size_t> globals;
    std::size_t rest = c;
    for (std::size_t i = g.player_count(); i-- > 0;) {
      const auto n = g.players()[i].trajectory_count();
      globals.insert(globals.begin(), rest % n);
      rest /= n;
    }
    const auto [m0, t0] = g.locate(0, globals[0]);
    const auto [m1, t1] = g.locate(1, globals[1]);
    if (p0[m0].maneuver.kind != ManeuverKind::proceed || p1[m1].maneuver.kind != ManeuverKind::track_speed) continue;
    if (g.utility(c, 0).safety < 0) unsafe = true;
  }
  EXPECT_TRUE(unsafe);
}

TEST(BuildGame, DegeneratePlayerIsNamed) {
  const auto map = fixtures::four_way();
  auto v = fixtures::on_lane(map, 7, fixtures::lane_id(Approach::south, TurnType::left), 30, 6);
  v.state.x += 1.7;  // beyond the lateral bound
  try {
    build_game(testkit::scene_of({v}), map, UtilityParams{});
    FAIL() << "expected DegeneratePlayerError";
  } catch (const DegeneratePlayerError& e) {
    EXPECT_NE(std::string(e.what()).find('7'), std::string::npos);
  }
}

TEST(Maxmax, SinglePlayerTakesItsBest) {
  auto g = shaped({{3}});
  g.set_utility(0, 0, {0.2, 0.1});
  g.set_utility(1, 0, {0.7, 0.1});
  g.set_utility(2, 0, {0.6, 0.9});
  const auto s = solve_maxmax(g, {0}, 0.5);
  EXPECT_EQ(s.choices[0].trajectory, 2u);  // both satisficed, more progress
}

TEST(Maxmax, SharedBestCell) {
  auto g = shaped({{2}, {2}});
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < 2; ++i) g.set_utility(c, i, {0.1, 0.0});
  g.set_utility(g.cell_index({1, 1}), 0, {0.4, 0.0});
  g.set_utility(g.cell_index({1, 1}), 1, {0.4, 0.0});
  const auto s = solve_maxmax(g, {0, 0}, 0.5);
  EXPECT_EQ(globals_of(g, s), (std::vector<std::size_t>{1, 1}));
}

TEST(Maxmax, OptimisticArgmaxesDisagree) {
  auto g = shaped({{2}, {2}});
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < 2; ++i) g.set_utility(c, i, {0.1, 0.0});
  g.set_utility(g.cell_index({0, 1}), 0, {0.4, 0.0});
  g.set_utility(g.cell_index({1, 0}), 1, {0.4, 0.0});
  const auto s = solve_maxmax(g, {0, 0}, 0.5);
  // Each takes its own component of the cell best for itself.
  EXPECT_EQ(globals_of(g, s), (std::vector<std::size_t>{0, 0}));
}

TEST(Nash, SinglePlayerMaximizes) {
  auto g = shaped({{1, 1}});
  g.set_utility(0, 0, {0.1, 0.9});
  g.set_utility(1, 0, {0.3, 0.0});
  const auto s = solve_nash_maneuvers(g, 0.5);
  EXPECT_EQ(s.choices[0].maneuver, 1u);
  EXPECT_FALSE(s.diagnostics.fallback);
}

TEST(Nash, HigherSocialSumWins) {
  // Maneuver 0 proceeds, 1 waits.
  auto g = shaped({{1, 1}, {1, 1}});
  auto put = [&](std::size_t m0, std::size_t m1, double u0, double u1) {
    const auto c = g.cell_index({m0, m1});
    g.set_utility(c, 0, {u0, 0.0});
    g.set_utility(c, 1, {u1, 0.0});
  };
  put(0, 0, -0.8, -0.8);
  put(0, 1, 0.6, 0.5);  // social sum 1.1
  put(1, 0, 0.6, 0.8);  // social sum 1.4
  put(1, 1, 0.3, 0.3);
  const auto oracle = testkit::brute_nash(g, 0.5);
  ASSERT_EQ(oracle.equilibria.size(), 2u);
  const auto s = solve_nash_maneuvers(g, 0.5);
  EXPECT_EQ(maneuvers_of(s), (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(s.diagnostics.equilibrium_count, 2);
  EXPECT_FALSE(s.diagnostics.fallback);
  EXPECT_EQ(s.diagnostics.tie_break, "social_welfare");
}

TEST(Nash, MatchingPenniesFallsBack) {
  auto g = shaped({{1, 1}, {1, 1}});
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) {
      const auto c = g.cell_index({a, b});
      const bool match = a == b;
      g.set_utility(c, 0, {match ? 0.3 : -0.2, 0.0});
      g.set_utility(c, 1, {match ? -0.2 : 0.3, 0.0});
    }
  EXPECT_TRUE(testkit::brute_nash(g, 0.5).equilibria.empty());
  const auto s = solve_nash_maneuvers(g, 0.5);
  EXPECT_TRUE(s.diagnostics.fallback);
  EXPECT_EQ(s.diagnostics.equilibrium_count, 0);
  EXPECT_EQ(s.diagnostics.tie_break, "maxmax_fallback");
  EXPECT_EQ(globals_of(g, s), testkit::brute_maxmax(g, {}, 0.5));
}

TEST(NashProperty, ReturnedProfilesAreEquilibria) {
  testkit::Rng rng(52);
  int equilibria = 0, fallbacks = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto g = testkit::random_game(rng, 4, 3, 3);
    const auto s = solve_nash_maneuvers(g, 0.5);
    ASSERT_EQ(s.choices.size(), g.player_count());
    const auto oracle = testkit::brute_nash(g, 0.5);
    EXPECT_EQ(s.diagnostics.equilibrium_count, static_cast<int>(oracle.equilibria.size()));
    if (s.diagnostics.fallback) {
      ++fallbacks;
      EXPECT_TRUE(oracle.equilibria.empty());
      EXPECT_EQ(globals_of(g, s), testkit::brute_maxmax(g, {}, 0.5));
      continue;
    }
    ++equilibria;
    const auto m = maneuvers_of(s);
    EXPECT_TRUE(testkit::is_pure_nash(g, m, 0.5));
    EXPECT_EQ(oracle.selected, m);
    EXPECT_EQ(globals_of(g, s), testkit::brute_maxmax(g, m, 0.5));
  }
  EXPECT_GT(equilibria, 0);
  EXPECT_GT(fallbacks, 0);
}

TEST(NashProperty, ProgressRescalingKeepsEquilibria) {
  testkit::Rng rng(53);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = testkit::random_game(rng, 3, 3, 3);
    // All safety values on one side of gamma.
    const bool above = trial % 2 == 0;
    for (std::size_t c = 0; c < g.cell_count(); ++c)
      for (std::size_t i = 0; i < g.player_count(); ++i) {
        auto u = g.utility(c, i);
        u.safety = above ? 0.5 + std::abs(u.safety) / 4 : -std::abs(u.safety) / 2;
        g.set_utility(c, i, u);
      }
    auto scaled = g;
    const double a = rng.uniform(0.1, 10), b = rng.uniform(-1, 1);
    for (std::size_t c = 0; c < g.cell_count(); ++c)
      for (std::size_t i = 0; i < g.player_count(); ++i) {
        auto u = g.utility(c, i);
        u.progress = a * u.progress + b;
        scaled.set_utility(c, i, u);
      }
    EXPECT_EQ(testkit::brute_nash(g, 0.5).equilibria, testkit::brute_nash(scaled, 0.5).equilibria);
    const auto s0 = solve_nash_maneuvers(g, 0.5);
    const auto s1 = solve_nash_maneuvers(scaled, 0.5);
    EXPECT_EQ(s0.diagnostics.equilibrium_count, s1.diagnostics.equilibrium_count);
    EXPECT_EQ(s0.diagnostics.fallback, s1.diagnostics.fallback);
    if (!s1.diagnostics.fallback) EXPECT_TRUE(testkit::is_pure_nash(g, maneuvers_of(s1), 0.5));
  }
}

TEST(MaxmaxProperty, AgreesWithEnumeration) {
  testkit::Rng rng(54);
  int cells = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = testkit::random_game(rng, 3, 2, 4);
    for_each_maneuver_cell(g, [&](const std::vector<std::size_t>& m) {
      ++cells;
      EXPECT_EQ(globals_of(g, solve_maxmax(g, m, 0.5)), testkit::brute_maxmax(g, m, 0.5));
    });
    EXPECT_EQ(globals_of(g, solve_maxmax_full(g, 0.5)), testkit::brute_maxmax(g, {}, 0.5));
  }
  EXPECT_GE(cells, 300);
}

TEST(GameDump, JsonCarriesTableAndDiagnostics) {
  auto g = shaped({{1, 1}});
  g.set_utility(0, 0, {0.1, 0.9});
  g.set_utility(1, 0, {0.3, 0.0});
  const auto s = solve_nash_maneuvers(g, 0.5);
  const auto j = nlohmann::json::parse(game_to_json(g, &s));
  EXPECT_TRUE(j.contains("players"));
  EXPECT_TRUE(j.contains("cells"));
  EXPECT_TRUE(j.contains("solution"));
}
