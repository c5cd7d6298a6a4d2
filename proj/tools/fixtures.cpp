#include "fixtures.hpp"

#include "hocc/error.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

namespace hocc::fixtures {

namespace {

constexpr double kStraightStep = 1.0;
constexpr double kArcStep = 0.5;

void straight(std::vector<Vec2d>& pts, const Vec2d& a, const Vec2d& b) {
  const auto n = static_cast<int>(std::ceil((b - a).norm() / kStraightStep));
  for (int i = pts.empty() ? 0 : 1; i <= n; ++i) pts.push_back(a + (b - a) * (static_cast<double>(i) / n));
}

void arc(std::vector<Vec2d>& pts, const Vec2d& center, double radius, double from, double to) {
  const auto n = static_cast<int>(std::ceil(std::abs(to - from) * radius / kArcStep));
  for (int i = 1; i <= n; ++i) {
    const double a = from + (to - from) * i / n;
    pts.push_back(center + radius * Vec2d(std::cos(a), std::sin(a)));
  }
}

/// Northbound route, rotated by `quarter_turns` * 90 degrees.
std::vector<Vec2d> route(const IntersectionSpec& s, TurnType turn, int quarter_turns) {
  const double o = s.lane_offset, a = s.turn_start, far = a + s.reach;
  const double half_pi = std::numbers::pi / 2;
  std::vector<Vec2d> pts;
  switch (turn) {
    case TurnType::through:
      straight(pts, {o, -far}, {o, far});
      break;
    case TurnType::left:
      straight(pts, {o, -far}, {o, -a});
      arc(pts, {-a, -a}, a + o, 0, half_pi);
      straight(pts, {-a, o}, {-far, o});
      break;
    case TurnType::right:
      straight(pts, {o, -far}, {o, -a});
      arc(pts, {a, -a}, a - o, std::numbers::pi, half_pi);
      straight(pts, {a, -o}, {far, -o});
      break;
  }
  const double r = quarter_turns * half_pi;
  const double c = std::cos(r), sn = std::sin(r);
  for (auto& p : pts) p = Vec2d(c * p.x() - sn * p.y(), sn * p.x() + c * p.y());
  return pts;
}

bool segments_cross(const Vec2d& p, const Vec2d& p2, const Vec2d& q, const Vec2d& q2, Vec2d& at) {
  const Vec2d r = p2 - p, d = q2 - q;
  const double den = cross2<double>(r, d);
  if (std::abs(den) < 1e-12) return false;
  const double t = cross2<double>(q - p, d) / den;
  const double u = cross2<double>(q - p, r) / den;
  if (t < 0 || t > 1 || u < 0 || u > 1) return false;
  at = p + t * r;
  return true;
}

bool routes_cross(const std::vector<Vec2d>& a, const std::vector<Vec2d>& b, double half) {
  for (std::size_t i = 0; i + 1 < a.size(); ++i)
    for (std::size_t j = 0; j + 1 < b.size(); ++j) {
      Vec2d at;
      if (segments_cross(a[i], a[i + 1], b[j], b[j + 1], at) && std::abs(at.x()) <= half && std::abs(at.y()) <= half)
        return true;
    }
  return false;
}

}  // namespace

int lane_id(Approach from, TurnType turn) {
  const int t = turn == TurnType::through ? 0 : (turn == TurnType::left ? 1 : 2);
  return 10 * (static_cast<int>(from) + 1) + t;
}

LaneMap four_way(const IntersectionSpec& spec) {
  std::vector<LanePath> lanes;
  std::vector<std::pair<int, std::vector<Vec2d>>> routes;
  for (int k = 0; k < 4; ++k)
    for (auto turn : {TurnType::through, TurnType::left, TurnType::right}) {
      const int id = lane_id(static_cast<Approach>(k), turn);
      auto pts = route(spec, turn, k);
      const double limit = turn == TurnType::through ? spec.through_limit
                           : turn == TurnType::left  ? spec.left_limit
                                                     : spec.right_limit;
      routes.emplace_back(id, pts);
      lanes.emplace_back(id, std::move(pts), limit, turn);
    }

  // Crossing routes from different approaches conflict; routes sharing an
  // exit merge rather than cross and are left out.
  std::set<std::pair<int, int>> conflicts;
  for (std::size_t i = 0; i < routes.size(); ++i)
    for (std::size_t j = i + 1; j < routes.size(); ++j) {
      const auto& [ia, ra] = routes[i];
      const auto& [ib, rb] = routes[j];
      if (ia / 10 == ib / 10) continue;
      if ((ra.back() - rb.back()).norm() < 1.0) continue;
      if (routes_cross(ra, rb, spec.polygon_half)) conflicts.emplace(ia, ib);
    }

  const double h = spec.polygon_half;
  std::vector<Vec2d> polygon{{-h, -h}, {h, -h}, {h, h}, {-h, h}};
  return LaneMap(std::move(lanes), std::move(conflicts), std::move(polygon));
}

SceneVehicle on_lane(const LaneMap& map, VehicleId id, int lane, double s, double speed, Role role) {
  const auto& path = map.lane(lane);
  SceneVehicle v;
  v.id = id;
  v.lane = lane;
  v.role = role;
  const Vec2d p = path.position(s);
  v.state.x = p.x();
  v.state.y = p.y();
  v.state.yaw = path.heading(s);
  v.state.vy = speed;
  return v;
}

double crossing_s(const LaneMap& map, int lane, int other) {
  const auto s = map.crossing(lane, other);
  if (!s) throw Error("lanes " + std::to_string(lane) + " and " + std::to_string(other) + " do not cross");
  return *s;
}

TrackDataset snapshot_dataset(const std::vector<std::vector<SceneVehicle>>& layouts, double dt, double spacing) {
  TrackDataset ds;
  ds.dt = dt;
  for (std::size_t i = 0; i < layouts.size(); ++i)
    for (const auto& v : layouts[i]) {
      Track& t = ds.tracks[v.id];
      if (!t.states.empty()) throw Error("vehicle id " + std::to_string(v.id) + " reused across layouts");
      t.id = v.id;
      t.lane = v.lane;
      t.times.push_back(static_cast<double>(i) * spacing);
      t.states.push_back(v.state);
    }
  return ds;
}

Scene make_scene(std::vector<SceneVehicle> vehicles, const std::string& id, double time) {
  Scene s;
  s.id = id;
  s.time = time;
  s.kind = ScenarioKind::ltap;
  s.provenance.source = id;
  for (std::size_t i = 0; i < vehicles.size(); ++i) vehicles[i].role = i == 0 ? Role::subject : Role::relevant;
  std::sort(vehicles.begin(), vehicles.end(), [](const SceneVehicle& a, const SceneVehicle& b) { return a.id < b.id; });
  s.vehicles = std::move(vehicles);
  return s;
}

LayoutRanges tagging_on_ranges() {
  return {{0.0, 0.2}, {7.0, 7.4}, {12.0, 14.0}, {-0.4, -0.3}};
}

std::vector<std::vector<SceneVehicle>> tagging_on_layouts(const LaneMap& map, int count, std::uint64_t seed,
                                                          VehicleId first_id, const LayoutRanges& ranges) {
  const int turner_lane = lane_id(Approach::south, TurnType::left);
  const int oncoming_lane = lane_id(Approach::north, TurnType::through);
  const double c1 = crossing_s(map, turner_lane, oncoming_lane);
  const double c2 = crossing_s(map, oncoming_lane, turner_lane);
  // Turner placed just inside the intersection polygon.
  const double entry = map.lane(turner_lane).project({1.75, -13.5}).s;

  std::mt19937_64 rng(seed);
  auto uniform = [&](std::pair<double, double> r) {
    return std::uniform_real_distribution<double>(r.first, r.second)(rng);
  };
  std::vector<std::vector<SceneVehicle>> out;
  for (int k = 0; k < count; ++k) {
    const double s1 = entry + uniform(ranges.turner_advance);
    const double v1 = uniform(ranges.turner_speed);
    const double v2 = uniform(ranges.oncoming_speed);
    const double meet = (c1 - s1) / v1 + uniform(ranges.meet);
    const double s2 = c2 - v2 * meet;
    const VehicleId id = first_id + 2 * k;
    out.push_back({on_lane(map, id, turner_lane, s1, v1), on_lane(map, id + 1, oncoming_lane, s2, v2)});
  }
  return out;
}

namespace {

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError(p.string(), "cannot open for writing");
  f << text;
}

}  // namespace

void write_corpus(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto map = four_way();
  write(dir / "map.json", map_to_json(map) + "\n");
  write(dir / "tagging_on_tracks.csv", tracks_to_csv(snapshot_dataset(tagging_on_layouts(map, 8, 1, 1, tagging_on_ranges()))));
  write(dir / "unoccluded_tracks.csv", tracks_to_csv(snapshot_dataset(tagging_on_layouts(map, 50, 2, 1001))));
}

}  // namespace hocc::fixtures
