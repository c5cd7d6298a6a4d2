#include "hocc/game.hpp"

#include "hocc/error.hpp"
#include "hocc/situations.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hocc {

double safety_utility(double min_clearance, const UtilityParams& p) {
  if (min_clearance == std::numeric_limits<double>::infinity()) return 1.0;
  return 2.0 / (1.0 + std::exp(-p.sigmoid_slope * (min_clearance - p.sigmoid_midpoint))) - 1.0;
}

double progress_utility(double arclength, const UtilityParams& p) {
  return std::clamp(arclength / p.progress_norm, 0.0, 1.0);
}

double progress_utility(const Trajectory& traj, const UtilityParams& p) { return progress_utility(traj.progress, p); }

std::partial_ordering lex_compare(const Utility& a, const Utility& b, double gamma) {
  const double sa = std::min(a.safety, gamma);
  const double sb = std::min(b.safety, gamma);
  if (sa != sb) return sa <=> sb;
  return a.progress <=> b.progress;
}

std::size_t PlayerActions::trajectory_count() const {
  std::size_t n = 0;
  for (const auto& m : maneuvers) n += m.trajectories.size();
  return n;
}

GameView::GameView(std::vector<PlayerActions> players) : players_(std::move(players)) {
  cells_ = players_.empty() ? 0 : 1;
  for (const auto& p : players_) {
    std::vector<std::size_t> off;
    std::size_t acc = 0;
    for (const auto& m : p.maneuvers) {
      off.push_back(acc);
      acc += m.trajectories.size();
    }
    if (acc == 0) throw DegeneratePlayerError(p.vehicle);
    offsets_.push_back(std::move(off));
    radix_.push_back(acc);
    cells_ *= acc;
  }
  table_.assign(cells_ * players_.size(), Utility{});
}

int GameView::player_index(VehicleId v) const {
  for (std::size_t i = 0; i < players_.size(); ++i)
    if (players_[i].vehicle == v) return static_cast<int>(i);
  return -1;
}

std::size_t GameView::global_index(std::size_t p, std::size_t maneuver, std::size_t local) const {
  return offsets_[p][maneuver] + local;
}

std::pair<std::size_t, std::size_t> GameView::locate(std::size_t p, std::size_t global) const {
  const auto& off = offsets_[p];
  const auto it = std::upper_bound(off.begin(), off.end(), global);
  const auto m = static_cast<std::size_t>(it - off.begin()) - 1;
  return {m, global - off[m]};
}

std::size_t GameView::cell_index(const std::vector<std::size_t>& globals) const {
  std::size_t c = 0;
  for (std::size_t p = 0; p < players_.size(); ++p) c = c * radix_[p] + globals[p];
  return c;
}

const PlayerChoice* StrategyProfile::find(VehicleId v) const {
  for (const auto& c : choices)
    if (c.vehicle == v) return &c;
  return nullptr;
}

GameView build_game(const Scene& players, const LaneMap& map, const UtilityParams& p, const MotionParams& motion,
                    const GameLimits& limits) {
  if (players.vehicles.empty()) throw Error("build_game: no players");
  std::vector<PlayerActions> actions;
  std::size_t cells = 1;
  for (const auto& v : players.vehicles) {
    PlayerActions pa;
    pa.vehicle = v.id;
    const bool has_leader = leading_vehicle(v.id, players, map).has_value();
    for (const auto& m : admissible_maneuvers(v, map, has_leader)) {
      auto trajs = generate_trajectories(v.id, players, m, map, motion);
      if (!trajs.empty()) pa.maneuvers.push_back({m, std::move(trajs)});
    }
    const std::size_t n = pa.trajectory_count();
    if (n == 0) throw DegeneratePlayerError(v.id);
    cells *= n;
    if (cells > limits.max_cells)
      throw Error("build_game: joint action product exceeds " + std::to_string(limits.max_cells) + " cells");
    actions.push_back(std::move(pa));
  }
  GameView g(std::move(actions));
  evaluate_utilities(g, p);
  return g;
}

namespace {

/// Trajectories of player `p` in global index order.
std::vector<const Trajectory*> flatten(const PlayerActions& p) {
  std::vector<const Trajectory*> out;
  for (const auto& m : p.maneuvers)
    for (const auto& t : m.trajectories) out.push_back(&t);
  return out;
}

/// Odometer over a mixed-radix tuple; returns false after the last tuple.
bool advance(std::vector<std::size_t>& idx, const std::vector<std::size_t>& lo, const std::vector<std::size_t>& hi) {
  for (std::size_t p = idx.size(); p-- > 0;) {
    if (++idx[p] < hi[p]) return true;
    idx[p] = lo[p];
  }
  return false;
}

}  // namespace

void evaluate_utilities(GameView& g, const UtilityParams& p) {
  const std::size_t n = g.player_count();
  std::vector<std::vector<const Trajectory*>> traj(n);
  for (std::size_t i = 0; i < n; ++i) traj[i] = flatten(g.players()[i]);

  // Pairwise minimum clearance for every trajectory combination.
  struct PairTable {
    std::size_t a, b;
    std::vector<double> min;  // row-major over (traj a, traj b)
  };
  std::vector<PairTable> pairs;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      PairTable t{a, b, {}};
      t.min.reserve(traj[a].size() * traj[b].size());
      for (const auto* ta : traj[a])
        for (const auto* tb : traj[b]) t.min.push_back(gap_profile(*ta, *tb).min());
      pairs.push_back(std::move(t));
    }

  std::vector<std::size_t> lo(n, 0), hi(n), idx(n, 0);
  for (std::size_t i = 0; i < n; ++i) hi[i] = traj[i].size();
  do {
    double clearance = std::numeric_limits<double>::infinity();
    for (const auto& t : pairs) clearance = std::min(clearance, t.min[idx[t.a] * hi[t.b] + idx[t.b]]);
    const double safety = safety_utility(clearance, p);
    const std::size_t cell = g.cell_index(idx);
    for (std::size_t i = 0; i < n; ++i) g.set_utility(cell, i, {safety, progress_utility(*traj[i][idx[i]], p)});
  } while (advance(idx, lo, hi));
}

namespace {

/// Maxmax over the box [lo, hi) of global trajectory indices.
StrategyProfile maxmax_box(const GameView& g, const std::vector<std::size_t>& lo, const std::vector<std::size_t>& hi,
                           double gamma) {
  const std::size_t n = g.player_count();
  StrategyProfile out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> idx = lo;
    std::vector<std::size_t> best = lo;
    const Utility* best_u = &g.utility(g.cell_index(idx), i);
    while (advance(idx, lo, hi)) {
      const Utility& u = g.utility(g.cell_index(idx), i);
      const auto c = lex_compare(u, *best_u, gamma);
      if (c > 0 || (c == 0 && idx[i] < best[i])) {
        best = idx;
        best_u = &u;
      }
    }
    const auto [m, local] = g.locate(i, best[i]);
    out.choices.push_back({g.players()[i].vehicle, m, local});
  }
  return out;
}

}  // namespace

StrategyProfile solve_maxmax(const GameView& g, const std::vector<std::size_t>& maneuver_cell, double gamma) {
  const std::size_t n = g.player_count();
  std::vector<std::size_t> lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t m = maneuver_cell[i];
    lo[i] = g.global_index(i, m, 0);
    hi[i] = lo[i] + g.players()[i].maneuvers[m].trajectories.size();
  }
  return maxmax_box(g, lo, hi, gamma);
}

StrategyProfile solve_maxmax_full(const GameView& g, double gamma) {
  const std::size_t n = g.player_count();
  std::vector<std::size_t> lo(n, 0), hi(n);
  for (std::size_t i = 0; i < n; ++i) hi[i] = g.players()[i].trajectory_count();
  return maxmax_box(g, lo, hi, gamma);
}

std::size_t profile_cell(const GameView& g, const StrategyProfile& s) {
  std::vector<std::size_t> globals(g.player_count());
  for (std::size_t i = 0; i < g.player_count(); ++i)
    globals[i] = g.global_index(i, s.choices[i].maneuver, s.choices[i].trajectory);
  return g.cell_index(globals);
}

StrategyProfile solve_nash_maneuvers(const GameView& g, double gamma) {
  const std::size_t n = g.player_count();
  std::vector<std::size_t> lo(n, 0), hi(n);
  std::size_t profiles = 1;
  for (std::size_t i = 0; i < n; ++i) {
    hi[i] = g.players()[i].maneuvers.size();
    profiles *= hi[i];
  }
  auto flat = [&](const std::vector<std::size_t>& m) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c = c * hi[i] + m[i];
    return c;
  };

  // Maneuver-level payoffs at each cell's maxmax resolution.
  std::vector<StrategyProfile> resolved(profiles);
  std::vector<Utility> payoff(profiles * n);
  std::vector<std::size_t> m(n, 0);
  do {
    const std::size_t c = flat(m);
    resolved[c] = solve_maxmax(g, m, gamma);
    const std::size_t cell = profile_cell(g, resolved[c]);
    for (std::size_t i = 0; i < n; ++i) payoff[c * n + i] = g.utility(cell, i);
  } while (advance(m, lo, hi));

  int count = 0;
  int tied = 0;
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  std::fill(m.begin(), m.end(), 0);
  do {
    const std::size_t c = flat(m);
    bool stable = true;
    for (std::size_t i = 0; i < n && stable; ++i) {
      auto dev = m;
      for (std::size_t alt = 0; alt < hi[i] && stable; ++alt) {
        if (alt == m[i]) continue;
        dev[i] = alt;
        if (lex_compare(payoff[flat(dev) * n + i], payoff[c * n + i], gamma) > 0) stable = false;
      }
    }
    if (!stable) continue;
    ++count;
    double score = 0;
    for (std::size_t i = 0; i < n; ++i) score += social_score(payoff[c * n + i]);
    if (score > best_score) {
      best_score = score;
      best = c;
      tied = 1;
    } else if (score == best_score) {
      ++tied;
    }
  } while (advance(m, lo, hi));

  if (count == 0) {
    StrategyProfile s = solve_maxmax_full(g, gamma);
    s.diagnostics = {0, true, "maxmax_fallback"};
    return s;
  }
  StrategyProfile s = resolved[best];
  s.diagnostics.equilibrium_count = count;
  s.diagnostics.fallback = false;
  s.diagnostics.tie_break = count == 1 ? "unique" : (tied == 1 ? "social_welfare" : "maneuver_index");
  return s;
}

std::string game_to_json(const GameView& g, const StrategyProfile* solution) {
  using nlohmann::json;
  json j;
  json players = json::array();
  for (const auto& p : g.players()) {
    json jp;
    jp["vehicle"] = p.vehicle;
    json ms = json::array();
    for (const auto& m : p.maneuvers) {
      json jm;
      jm["kind"] = std::string(to_string(m.maneuver.kind));
      jm["lane"] = m.maneuver.lane;
      json ts = json::array();
      for (const auto& t : m.trajectories) ts.push_back({{"target_speed", t.target_speed}, {"progress", t.progress}});
      jm["trajectories"] = std::move(ts);
      ms.push_back(std::move(jm));
    }
    jp["maneuvers"] = std::move(ms);
    players.push_back(std::move(jp));
  }
  j["players"] = std::move(players);
  json cells = json::array();
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    json row = json::array();
    for (std::size_t i = 0; i < g.player_count(); ++i) {
      const auto& u = g.utility(c, i);
      row.push_back(json::array({u.safety, u.progress}));
    }
    cells.push_back(std::move(row));
  }
  j["cells"] = std::move(cells);
  if (solution) {
    json ch = json::array();
    for (const auto& c : solution->choices)
      ch.push_back({{"vehicle", c.vehicle}, {"maneuver", c.maneuver}, {"trajectory", c.trajectory}});
    j["solution"] = {{"choices", std::move(ch)},
                     {"equilibrium_count", solution->diagnostics.equilibrium_count},
                     {"fallback", solution->diagnostics.fallback},
                     {"tie_break", solution->diagnostics.tie_break}};
  }
  return j.dump();
}

}  // namespace hocc
