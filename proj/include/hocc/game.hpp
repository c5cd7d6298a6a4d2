#pragma once

// Simultaneous-move games over maneuver-grouped trajectory sets. Utilities
// are (safety, progress) pairs ranked lexicographically with safety
// satisficed at a threshold; maneuvers are resolved by pure Nash
// equilibrium and trajectories within a maneuver cell by maxmax.

#include "hocc/lane_map.hpp"
#include "hocc/motion.hpp"
#include "hocc/scene.hpp"

#include <compare>
#include <string>
#include <vector>

namespace hocc {

struct UtilityParams {
  double gamma = 0.5;
  double sigmoid_midpoint = 1.0;  ///< meters
  double sigmoid_slope = 1.5;     ///< per meter
  double progress_norm = kDefaultMaxSpeed * 6.0;
};

struct Utility {
  double safety = 0;
  double progress = 0;
  bool operator==(const Utility&) const = default;
};

/// Maps a clearance in meters into (-1, 1).
double safety_utility(double min_clearance, const UtilityParams& p);
double progress_utility(const Trajectory& traj, const UtilityParams& p);
double progress_utility(double arclength, const UtilityParams& p);

/// Safety compared after clamping at gamma; progress breaks ties.
std::partial_ordering lex_compare(const Utility& a, const Utility& b, double gamma);

/// Scalarization used only to pick among several equilibria.
inline double social_score(const Utility& u) { return u.safety + 1e-3 * u.progress; }

struct ManeuverActions {
  Maneuver maneuver;
  std::vector<Trajectory> trajectories;
};

struct PlayerActions {
  VehicleId vehicle = 0;
  std::vector<ManeuverActions> maneuvers;

  std::size_t trajectory_count() const;
};

/// One agent's game: players, maneuver-grouped action sets and a complete
/// utility table over the joint trajectory product. Cells are indexed in
/// mixed radix with player 0 most significant; each player's trajectories
/// are numbered maneuver by maneuver.
class GameView {
 public:
  GameView() = default;
  explicit GameView(std::vector<PlayerActions> players);

  const std::vector<PlayerActions>& players() const { return players_; }
  std::size_t player_count() const { return players_.size(); }
  std::size_t cell_count() const { return cells_; }
  int player_index(VehicleId v) const;

  /// Global trajectory index of (maneuver, local) for player `p`.
  std::size_t global_index(std::size_t p, std::size_t maneuver, std::size_t local) const;
  std::pair<std::size_t, std::size_t> locate(std::size_t p, std::size_t global) const;
  std::size_t cell_index(const std::vector<std::size_t>& globals) const;

  const Utility& utility(std::size_t cell, std::size_t player) const { return table_[cell * players_.size() + player]; }
  void set_utility(std::size_t cell, std::size_t player, Utility u) { table_[cell * players_.size() + player] = u; }

  const Trajectory& trajectory(std::size_t p, std::size_t maneuver, std::size_t local) const {
    return players_[p].maneuvers[maneuver].trajectories[local];
  }

 private:
  std::vector<PlayerActions> players_;
  std::vector<std::vector<std::size_t>> offsets_;
  std::vector<std::size_t> radix_;
  std::size_t cells_ = 0;
  std::vector<Utility> table_;
};

struct PlayerChoice {
  VehicleId vehicle = 0;
  std::size_t maneuver = 0;
  std::size_t trajectory = 0;  ///< index within the maneuver
  bool operator==(const PlayerChoice&) const = default;
};

struct SolverDiagnostics {
  int equilibrium_count = 0;
  bool fallback = false;
  std::string tie_break;
};

struct StrategyProfile {
  std::vector<PlayerChoice> choices;
  SolverDiagnostics diagnostics;

  const PlayerChoice* find(VehicleId v) const;
};

struct GameLimits {
  std::size_t max_cells = 2'000'000;
};

/// Builds the game among the vehicles of `players` (a scene restricted to
/// one agent's visible set). Throws DegeneratePlayerError when a vehicle has
/// no feasible trajectory.
GameView build_game(const Scene& players, const LaneMap& map, const UtilityParams& p,
                    const MotionParams& motion = {}, const GameLimits& limits = {});

/// Fills the utility table of `game` from the trajectories it holds.
void evaluate_utilities(GameView& game, const UtilityParams& p);

/// Each player takes its component of the joint trajectory tuple (within the
/// maneuver cell) that is best for itself. Ties go to the first tuple in
/// lexicographic index order.
StrategyProfile solve_maxmax(const GameView& g, const std::vector<std::size_t>& maneuver_cell, double gamma);

/// Per-player maxmax over every trajectory of every maneuver.
StrategyProfile solve_maxmax_full(const GameView& g, double gamma);

/// Pure Nash equilibrium over maneuvers, with payoffs taken at each maneuver
/// cell's maxmax resolution. Falls back to solve_maxmax_full when no pure
/// equilibrium exists.
StrategyProfile solve_nash_maneuvers(const GameView& g, double gamma);

/// Joint cell addressed by a profile.
std::size_t profile_cell(const GameView& g, const StrategyProfile& s);

std::string game_to_json(const GameView& g, const StrategyProfile* solution = nullptr);

}  // namespace hocc
