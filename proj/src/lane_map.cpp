#include "hocc/lane_map.hpp"

#include "hocc/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace hocc {

namespace {

constexpr double kHoldMargin = 0.5;
constexpr double kHoldStep = 0.25;
constexpr double kCorridorReach = 8.0;

std::optional<Vec2d> segment_intersection(const Vec2d& p0, const Vec2d& p1, const Vec2d& q0, const Vec2d& q1,
                                          double& t_out) {
  const Vec2d r = p1 - p0;
  const Vec2d s = q1 - q0;
  const double denom = cross2(r, s);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double t = cross2<double>(q0 - p0, s) / denom;
  const double u = cross2<double>(q0 - p0, r) / denom;
  if (t < 0 || t > 1 || u < 0 || u > 1) return std::nullopt;
  t_out = t;
  return p0 + t * r;
}

}  // namespace

std::string_view to_string(TurnType t) {
  switch (t) {
    case TurnType::left: return "left";
    case TurnType::right: return "right";
    case TurnType::through: return "through";
  }
  return "through";
}

TurnType turn_type_from_string(std::string_view s) {
  if (s == "left") return TurnType::left;
  if (s == "right") return TurnType::right;
  if (s == "through") return TurnType::through;
  throw Error("unknown turn type '" + std::string(s) + "'");
}

LanePath::LanePath(int id, std::vector<Vec2d> centerline, double speed_limit, TurnType turn)
    : id_(id), speed_limit_(speed_limit), turn_(turn), centerline_(std::move(centerline)) {
  if (centerline_.size() < 2) throw Error("lane " + std::to_string(id) + ": centerline needs at least two points");
  const auto& pts = centerline_;
  const std::size_t n = pts.size();

  std::vector<double> chord(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double h = (pts[i] - pts[i - 1]).norm();
    if (!(h > 0)) throw Error("lane " + std::to_string(id) + ": repeated centerline vertex");
    chord[i] = chord[i - 1] + h;
  }

  // Chord-length Catmull-Rom tangents (unit-speed parameterization).
  std::vector<Vec2d> tangent(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 == n ? n - 1 : i + 1;
    tangent[i] = (pts[b] - pts[a]) / (chord[b] - chord[a]);
  }

  dense_.push_back(pts[0]);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = chord[i + 1] - chord[i];
    const int pieces = std::max(1, static_cast<int>(std::ceil(h / kDenseStep)));
    for (int k = 1; k <= pieces; ++k) {
      const double t = static_cast<double>(k) / pieces;
      const double t2 = t * t, t3 = t2 * t;
      const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
      const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
      dense_.push_back(h00 * pts[i] + h10 * h * tangent[i] + h01 * pts[i + 1] + h11 * h * tangent[i + 1]);
    }
  }
  s_.resize(dense_.size());
  s_[0] = 0;
  for (std::size_t i = 1; i < dense_.size(); ++i) s_[i] = s_[i - 1] + (dense_[i] - dense_[i - 1]).norm();
}

std::size_t LanePath::segment(double s) const {
  auto it = std::upper_bound(s_.begin(), s_.end(), s);
  std::size_t k = it == s_.begin() ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
  return std::min(k, dense_.size() - 2);
}

Vec2d LanePath::position(double s) const {
  if (s <= 0) return dense_.front() + s * tangent(0);
  if (s >= length()) return dense_.back() + (s - length()) * tangent(length());
  const std::size_t k = segment(s);
  const double h = s_[k + 1] - s_[k];
  const double t = h > 0 ? (s - s_[k]) / h : 0;
  return dense_[k] + t * (dense_[k + 1] - dense_[k]);
}

Vec2d LanePath::tangent(double s) const {
  const std::size_t k = segment(std::clamp(s, 0.0, length()));
  return (dense_[k + 1] - dense_[k]).normalized();
}

double LanePath::heading(double s) const {
  const Vec2d t = tangent(s);
  return std::atan2(t.y(), t.x());
}

LanePath::Projection LanePath::project(const Vec2d& p) const {
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < dense_.size(); ++k) {
    const Vec2d a = dense_[k];
    const Vec2d ab = dense_[k + 1] - a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0;
    // Let the end segments extend so vehicles slightly past the ends project
    // onto the extrapolated path.
    const double lo = k == 0 ? -std::numeric_limits<double>::infinity() : 0.0;
    const double hi = k + 2 == dense_.size() ? std::numeric_limits<double>::infinity() : 1.0;
    t = std::clamp(t, lo, hi);
    const Vec2d foot = a + t * ab;
    const double d = (p - foot).norm();
    if (d < best.distance) {
      best.distance = d;
      best.s = s_[k] + t * std::sqrt(len2);
      best.offset = len2 > 0 ? cross2<double>(ab, p - foot) / std::sqrt(len2) : 0;
    }
  }
  return best;
}

bool point_in_polygon(const Vec2d& p, const std::vector<Vec2d>& poly) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2d& a = poly[i];
    const Vec2d& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

LaneMap::LaneMap(std::vector<LanePath> lanes, std::set<std::pair<int, int>> conflicts, std::vector<Vec2d> polygon)
    : lanes_(std::move(lanes)), polygon_(std::move(polygon)) {
  std::sort(lanes_.begin(), lanes_.end(), [](const LanePath& a, const LanePath& b) { return a.id() < b.id(); });
  for (std::size_t i = 0; i < lanes_.size(); ++i) {
    if (!index_.emplace(lanes_[i].id(), i).second)
      throw Error("duplicate lane id " + std::to_string(lanes_[i].id()));
  }
  for (auto [a, b] : conflicts) {
    if (!has_lane(a) || !has_lane(b)) throw Error("conflict references unknown lane");
    if (a == b) throw Error("lane conflicts with itself");
    conflicts_.emplace(std::min(a, b), std::max(a, b));
  }

  for (auto [a, b] : conflicts_) {
    const auto& pa = lane(a).centerline();
    const auto& pb = lane(b).centerline();
    // First crossing along each lane's direction of travel.
    std::optional<Vec2d> first_a, first_b;
    for (std::size_t i = 0; i + 1 < pa.size() && !first_a; ++i) {
      for (std::size_t j = 0; j + 1 < pb.size(); ++j) {
        double t;
        if (auto x = segment_intersection(pa[i], pa[i + 1], pb[j], pb[j + 1], t)) {
          first_a = x;
          break;
        }
      }
    }
    for (std::size_t j = 0; j + 1 < pb.size() && !first_b; ++j) {
      for (std::size_t i = 0; i + 1 < pa.size(); ++i) {
        double t;
        if (auto x = segment_intersection(pb[j], pb[j + 1], pa[i], pa[i + 1], t)) {
          first_b = x;
          break;
        }
      }
    }
    if (first_a) crossings_[{a, b}] = lane(a).project(*first_a).s;
    if (first_b) crossings_[{b, a}] = lane(b).project(*first_b).s;
  }

  const VehicleFootprint fp;
  for (const auto& path : lanes_) {
    double hold = std::numeric_limits<double>::infinity();
    for (int other : conflicting_lanes(path.id())) {
      auto sc = crossing(path.id(), other);
      auto so = crossing(other, path.id());
      if (!sc || !so) continue;
      const auto& op = lane(other);
      std::vector<OrientedBoxd> corridor;
      for (double ds = -kCorridorReach; ds <= kCorridorReach + 1e-9; ds += 0.5)
        corridor.push_back(make_box(op.position(*so + ds), op.heading(*so + ds), fp.length, fp.width));
      double s = *sc;
      for (; s > -kCorridorReach; s -= kHoldStep) {
        const auto mine = make_box(path.position(s), path.heading(s), fp.length, fp.width);
        bool clear = true;
        for (const auto& box : corridor)
          if (signed_clearance(mine, box) < kHoldMargin) {
            clear = false;
            break;
          }
        if (clear) break;
      }
      hold = std::min(hold, s);
    }
    hold_[path.id()] = hold;
  }
}

const LanePath& LaneMap::lane(int id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error("unknown lane " + std::to_string(id));
  return lanes_[it->second];
}

bool LaneMap::conflicting(int a, int b) const { return conflicts_.count({std::min(a, b), std::max(a, b)}) != 0; }

std::vector<int> LaneMap::conflicting_lanes(int lane_id) const {
  std::vector<int> out;
  for (auto [a, b] : conflicts_) {
    if (a == lane_id) out.push_back(b);
    if (b == lane_id) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool LaneMap::in_intersection(const Vec2d& p) const { return polygon_.size() >= 3 && point_in_polygon(p, polygon_); }

std::optional<double> LaneMap::crossing(int lane_id, int other) const {
  auto it = crossings_.find({lane_id, other});
  if (it == crossings_.end()) return std::nullopt;
  return it->second;
}

double LaneMap::hold_line(int lane_id) const {
  auto it = hold_.find(lane_id);
  return it == hold_.end() ? std::numeric_limits<double>::infinity() : it->second;
}

std::vector<std::string> LaneMap::validate() const {
  std::vector<std::string> issues;
  for (auto [a, b] : conflicts_) {
    auto sa = crossing(a, b);
    if (!sa) {
      issues.push_back("conflict (" + std::to_string(a) + "," + std::to_string(b) + ") centerlines do not cross");
      continue;
    }
    if (!in_intersection(lane(a).position(*sa)))
      issues.push_back("conflict (" + std::to_string(a) + "," + std::to_string(b) +
                       ") crosses outside the intersection polygon");
  }
  for (const auto& l : lanes_) {
    if (!(l.speed_limit() > 0)) issues.push_back("lane " + std::to_string(l.id()) + " has no speed limit");
    const auto& c = l.centerline();
    for (std::size_t i = 1; i < c.size(); ++i)
      if ((c[i] - c[i - 1]).norm() > 1.0 + 1e-9) {
        issues.push_back("lane " + std::to_string(l.id()) + " vertex spacing exceeds 1 m");
        break;
      }
  }
  return issues;
}

LaneMap parse_map_json(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, 0, e.what());
  }
  auto point = [&](const nlohmann::json& p) {
    if (!p.is_array() || p.size() != 2) throw ParseError(source, 0, "expected [x,y] point");
    return Vec2d(p[0].get<double>(), p[1].get<double>());
  };
  try {
    std::vector<LanePath> lanes;
    for (const auto& l : j.at("lanes")) {
      std::vector<Vec2d> pts;
      for (const auto& p : l.at("centerline")) pts.push_back(point(p));
      lanes.emplace_back(l.at("id").get<int>(), std::move(pts), l.at("speed_limit").get<double>(),
                         turn_type_from_string(l.value("turn", std::string("through"))));
    }
    std::set<std::pair<int, int>> conflicts;
    for (const auto& c : j.value("conflicts", nlohmann::json::array()))
      conflicts.emplace(c.at(0).get<int>(), c.at(1).get<int>());
    std::vector<Vec2d> polygon;
    for (const auto& p : j.value("intersection_polygon", nlohmann::json::array())) polygon.push_back(point(p));
    LaneMap map(std::move(lanes), std::move(conflicts), std::move(polygon));
    if (j.contains("successors")) {
      std::map<int, std::vector<int>> succ;
      for (const auto& [k, v] : j["successors"].items()) succ[std::stoi(k)] = v.get<std::vector<int>>();
      map.set_successors(std::move(succ));
    }
    return map;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 0, e.what());
  }
}

LaneMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open map");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_map_json(ss.str(), path.string());
}

std::string map_to_json(const LaneMap& map) {
  nlohmann::json j;
  j["lanes"] = nlohmann::json::array();
  for (const auto& l : map.lanes()) {
    nlohmann::json lj;
    lj["id"] = l.id();
    lj["centerline"] = nlohmann::json::array();
    for (const auto& p : l.centerline()) lj["centerline"].push_back({p.x(), p.y()});
    lj["speed_limit"] = l.speed_limit();
    lj["turn"] = std::string(to_string(l.turn()));
    j["lanes"].push_back(lj);
  }
  j["conflicts"] = nlohmann::json::array();
  for (auto [a, b] : map.conflicts()) j["conflicts"].push_back({a, b});
  j["intersection_polygon"] = nlohmann::json::array();
  for (const auto& p : map.intersection_polygon()) j["intersection_polygon"].push_back({p.x(), p.y()});
  if (!map.successors().empty()) {
    for (const auto& [k, v] : map.successors()) j["successors"][std::to_string(k)] = v;
  }
  return j.dump(1);
}

}  // namespace hocc
