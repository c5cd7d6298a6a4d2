#pragma once

#include "hocc/geometry.hpp"
#include "hocc/scene.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hocc {

enum class TurnType { left, right, through };

std::string_view to_string(TurnType t);
TurnType turn_type_from_string(std::string_view s);

/// Arclength-parameterized lane path. The input centerline is smoothed with
/// a chord-length Catmull-Rom spline and stored as a dense polyline, so that
/// positions are continuous in arclength and headings vary smoothly.
class LanePath {
 public:
  static constexpr double kDenseStep = 0.05;

  LanePath() = default;
  LanePath(int id, std::vector<Vec2d> centerline, double speed_limit, TurnType turn);

  int id() const { return id_; }
  double speed_limit() const { return speed_limit_; }
  TurnType turn() const { return turn_; }
  const std::vector<Vec2d>& centerline() const { return centerline_; }
  double length() const { return s_.empty() ? 0.0 : s_.back(); }

  /// Position at arclength `s`; linear extrapolation along the end tangents
  /// outside [0, length()].
  Vec2d position(double s) const;
  Vec2d tangent(double s) const;
  double heading(double s) const;

  struct Projection {
    double s = 0;
    double offset = 0;  ///< signed lateral offset, positive left of travel
    double distance = 0;
  };
  Projection project(const Vec2d& p) const;

 private:
  std::size_t segment(double s) const;

  int id_ = -1;
  double speed_limit_ = 0;
  TurnType turn_ = TurnType::through;
  std::vector<Vec2d> centerline_;
  std::vector<Vec2d> dense_;
  std::vector<double> s_;
};

class LaneMap {
 public:
  LaneMap() = default;
  LaneMap(std::vector<LanePath> lanes, std::set<std::pair<int, int>> conflicts, std::vector<Vec2d> polygon);

  const std::vector<LanePath>& lanes() const { return lanes_; }
  const LanePath& lane(int id) const;
  bool has_lane(int id) const { return index_.count(id) != 0; }
  const std::set<std::pair<int, int>>& conflicts() const { return conflicts_; }
  const std::vector<Vec2d>& intersection_polygon() const { return polygon_; }
  const std::map<int, std::vector<int>>& successors() const { return successors_; }
  void set_successors(std::map<int, std::vector<int>> s) { successors_ = std::move(s); }

  bool conflicting(int a, int b) const;
  std::vector<int> conflicting_lanes(int lane) const;
  bool in_intersection(const Vec2d& p) const;

  /// Arclength on `lane` where it first crosses `other`, if it does.
  std::optional<double> crossing(int lane, int other) const;
  /// Largest arclength on `lane` at which a default footprint keeps clear of
  /// every conflicting lane's corridor. Infinity when the lane has no
  /// conflicts.
  double hold_line(int lane) const;

  /// Geometric checks on a loaded map; returns one message per violation.
  std::vector<std::string> validate() const;

 private:
  std::vector<LanePath> lanes_;
  std::map<int, std::size_t> index_;
  std::set<std::pair<int, int>> conflicts_;
  std::vector<Vec2d> polygon_;
  std::map<int, std::vector<int>> successors_;
  std::map<std::pair<int, int>, double> crossings_;
  std::map<int, double> hold_;
};

LaneMap load_map(const std::filesystem::path& path);
LaneMap parse_map_json(const std::string& text, const std::string& source = "<map>");
std::string map_to_json(const LaneMap& map);

bool point_in_polygon(const Vec2d& p, const std::vector<Vec2d>& polygon);

}  // namespace hocc
