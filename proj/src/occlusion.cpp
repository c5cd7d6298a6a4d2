#include "hocc/occlusion.hpp"

#include "hocc/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace hocc {

OccupancyGrid::OccupancyGrid(double cell_size, CellIndex origin, long long width, long long height)
    : cell_size_(cell_size), origin_(origin), width_(width), height_(height),
      cells_(static_cast<std::size_t>(width * height), kEmpty) {}

CellIndex OccupancyGrid::cell_of(const Vec2d& p) const {
  return {static_cast<long long>(std::floor(p.x() / cell_size_)),
          static_cast<long long>(std::floor(p.y() / cell_size_))};
}

Vec2d OccupancyGrid::cell_center(const CellIndex& c) const {
  return {(static_cast<double>(c.ix) + 0.5) * cell_size_, (static_cast<double>(c.iy) + 0.5) * cell_size_};
}

bool OccupancyGrid::in_bounds(const CellIndex& c) const {
  return c.ix >= origin_.ix && c.iy >= origin_.iy && c.ix < origin_.ix + width_ && c.iy < origin_.iy + height_;
}

std::size_t OccupancyGrid::flat(const CellIndex& c) const {
  return static_cast<std::size_t>((c.iy - origin_.iy) * width_ + (c.ix - origin_.ix));
}

VehicleId OccupancyGrid::at(const CellIndex& c) const { return in_bounds(c) ? cells_[flat(c)] : kEmpty; }

void OccupancyGrid::set(const CellIndex& c, VehicleId v) {
  if (in_bounds(c)) cells_[flat(c)] = v;
}

std::size_t OccupancyGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](VehicleId v) { return v != kEmpty; }));
}

int RayBudget::rays_for(double distance) const {
  const double raw = distance > 0 ? k_att / distance : static_cast<double>(n_max);
  return static_cast<int>(std::clamp<long long>(std::llround(raw), n_min, n_max));
}

const PairVisibility* VisibilityReport::find(VehicleId observer, VehicleId target) const {
  auto it = pairs_.find({observer, target});
  return it == pairs_.end() ? nullptr : &it->second;
}

bool VisibilityReport::occluded(VehicleId observer, VehicleId target) const {
  const auto* p = find(observer, target);
  return p && p->occluded;
}

bool VisibilityReport::indicator(VehicleId observer, VehicleId occluder, VehicleId target) const {
  const auto* p = find(observer, target);
  return p && p->occluded && p->occluder == occluder;
}

bool VisibilityReport::any_occlusion() const {
  return std::any_of(pairs_.begin(), pairs_.end(), [](const auto& kv) { return kv.second.occluded; });
}

OccupancyGrid rasterize(const Scene& scene, double cell_size, double max_cells) {
  if (scene.vehicles.empty()) return OccupancyGrid(cell_size, {0, 0}, 1, 1);

  double minx = std::numeric_limits<double>::infinity(), miny = minx;
  double maxx = -minx, maxy = -minx;
  for (const auto& v : scene.vehicles)
    for (const auto& c : v.box().corners()) {
      minx = std::min(minx, c.x());
      miny = std::min(miny, c.y());
      maxx = std::max(maxx, c.x());
      maxy = std::max(maxy, c.y());
    }
  const long long pad = static_cast<long long>(std::ceil(1.0 / cell_size));
  const CellIndex lo{static_cast<long long>(std::floor(minx / cell_size)) - pad,
                     static_cast<long long>(std::floor(miny / cell_size)) - pad};
  const CellIndex hi{static_cast<long long>(std::floor(maxx / cell_size)) + pad,
                     static_cast<long long>(std::floor(maxy / cell_size)) + pad};
  const long long w = hi.ix - lo.ix + 1, h = hi.iy - lo.iy + 1;
  if (static_cast<double>(w) * static_cast<double>(h) > max_cells)
    throw GridTooLargeError("occupancy grid of " + std::to_string(w) + "x" + std::to_string(h) +
                            " cells exceeds the configured bound");

  OccupancyGrid grid(cell_size, lo, w, h);
  constexpr VehicleId kShared = OccupancyGrid::kEmpty + 1;
  std::vector<CellIndex> shared;
  for (const auto& v : scene.vehicles) {
    const auto box = v.box();
    double bx0 = std::numeric_limits<double>::infinity(), by0 = bx0, bx1 = -bx0, by1 = -bx0;
    for (const auto& c : box.corners()) {
      bx0 = std::min(bx0, c.x());
      by0 = std::min(by0, c.y());
      bx1 = std::max(bx1, c.x());
      by1 = std::max(by1, c.y());
    }
    const auto c0 = grid.cell_of({bx0, by0});
    const auto c1 = grid.cell_of({bx1, by1});
    for (long long iy = c0.iy; iy <= c1.iy; ++iy)
      for (long long ix = c0.ix; ix <= c1.ix; ++ix) {
        const CellIndex ci{ix, iy};
        if (!box.contains(grid.cell_center(ci))) continue;
        const VehicleId cur = grid.at(ci);
        if (cur == OccupancyGrid::kEmpty) {
          grid.set(ci, v.id);
        } else if (cur != v.id) {
          grid.set(ci, kShared);
          shared.push_back(ci);
        }
      }
  }
  for (const auto& ci : shared) grid.set(ci, OccupancyGrid::kEmpty);
  return grid;
}

std::vector<CellIndex> ray_cells(const OccupancyGrid& grid, const Vec2d& from, const Vec2d& to) {
  std::vector<CellIndex> out;
  const double c = grid.cell_size();
  CellIndex cur = grid.cell_of(from);
  const CellIndex end = grid.cell_of(to);
  if (!grid.in_bounds(cur)) return out;
  out.push_back(cur);

  const Vec2d d = to - from;
  const int step_x = d.x() > 0 ? 1 : (d.x() < 0 ? -1 : 0);
  const int step_y = d.y() > 0 ? 1 : (d.y() < 0 ? -1 : 0);
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto boundary = [c](long long i, int step) { return static_cast<double>(step > 0 ? i + 1 : i) * c; };
  double t_max_x = step_x != 0 ? (boundary(cur.ix, step_x) - from.x()) / d.x() : inf;
  double t_max_y = step_y != 0 ? (boundary(cur.iy, step_y) - from.y()) / d.y() : inf;
  const double t_delta_x = step_x != 0 ? c / std::abs(d.x()) : inf;
  const double t_delta_y = step_y != 0 ? c / std::abs(d.y()) : inf;

  const long long steps = std::llabs(end.ix - cur.ix) + std::llabs(end.iy - cur.iy);
  for (long long i = 0; i < steps; ++i) {
    const bool x_done = cur.ix == end.ix;
    const bool y_done = cur.iy == end.iy;
    if (!x_done && (y_done || t_max_x < t_max_y)) {
      cur.ix += step_x;
      t_max_x += t_delta_x;
    } else {
      cur.iy += step_y;
      t_max_y += t_delta_y;
    }
    if (!grid.in_bounds(cur)) break;
    out.push_back(cur);
  }
  return out;
}

std::optional<VehicleId> cast_ray(const OccupancyGrid& grid, const Vec2d& from, const Vec2d& to,
                                  const std::vector<VehicleId>& ignore) {
  for (const auto& ci : ray_cells(grid, from, to)) {
    const VehicleId v = grid.at(ci);
    if (v == OccupancyGrid::kEmpty) continue;
    if (std::find(ignore.begin(), ignore.end(), v) != ignore.end()) continue;
    return v;
  }
  return std::nullopt;
}

std::vector<Vec2d> ray_fan(const SceneVehicle& observer, const SceneVehicle& target, const RayBudget& budget) {
  const Vec2d origin = observer.state.position();
  const Vec2d to_center = target.state.position() - origin;
  const double dist = to_center.norm();
  if (dist < observer.footprint.length) return {};

  OrientedBoxd inset = target.box();
  inset.half_length = std::max(inset.half_length - budget.cell_size, 0.0);
  inset.half_width = std::max(inset.half_width - budget.cell_size, 0.0);
  const double base = std::atan2(to_center.y(), to_center.x());
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& c : inset.corners()) {
    const Vec2d r = c - origin;
    const double a = wrap_angle(std::atan2(r.y(), r.x()) - base);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  const int n = budget.rays_for(dist);
  std::vector<Vec2d> dirs;
  dirs.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double a = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(j) / (n - 1);
    dirs.push_back(heading_vector(base + a));
  }
  return dirs;
}

Vec2d ray_end(const SceneVehicle& observer, const SceneVehicle& target, const Vec2d& dir, const RayBudget& budget) {
  const Vec2d origin = observer.state.position();
  const auto box = target.box();
  // Slab exit distance through the target rectangle.
  const Vec2d rel = origin - box.center;
  double t_exit = std::numeric_limits<double>::infinity();
  bool hit = true;
  double t_enter = -std::numeric_limits<double>::infinity();
  for (const auto& [axis, half] : {std::pair{box.axis_u(), box.half_length}, std::pair{box.axis_v(), box.half_width}}) {
    const double p = rel.dot(axis), q = dir.dot(axis);
    if (std::abs(q) < 1e-15) {
      if (std::abs(p) > half) hit = false;
      continue;
    }
    double t0 = (-half - p) / q, t1 = (half - p) / q;
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
  }
  if (!hit || t_enter > t_exit) {
    double far = 0;
    for (const auto& c : box.corners()) far = std::max(far, (c - origin).norm());
    t_exit = far;
  }
  return origin + dir * (t_exit + budget.cell_size);
}

VisibilityReport occlusion_indicator(const Scene& scene, const RayBudget& budget, const std::vector<VehicleId>* among,
                                     std::vector<RaySample>* rays) {
  VisibilityReport report;
  const auto grid = rasterize(scene, budget.cell_size, budget.max_cells);
  auto included = [&](VehicleId id) {
    return !among || std::find(among->begin(), among->end(), id) != among->end();
  };

  for (const auto& obs : scene.vehicles) {
    if (!included(obs.id)) continue;
    for (const auto& tgt : scene.vehicles) {
      if (tgt.id == obs.id || !included(tgt.id)) continue;
      PairVisibility pv;
      const auto fan = ray_fan(obs, tgt, budget);
      if (fan.empty()) {
        // Closer than one vehicle length: visible by convention.
        pv.ray_count = pv.hit_count = budget.rays_for((tgt.state.position() - obs.state.position()).norm());
        report.set(obs.id, tgt.id, pv);
        continue;
      }
      std::map<VehicleId, int> blocked;
      const Vec2d origin = obs.state.position();
      for (const auto& dir : fan) {
        const Vec2d end = ray_end(obs, tgt, dir, budget);
        const auto hit = cast_ray(grid, origin, end, {obs.id});
        if (hit == tgt.id)
          ++pv.hit_count;
        else if (hit)
          ++blocked[*hit];
        if (rays) rays->push_back({obs.id, tgt.id, origin, end, hit});
      }
      pv.ray_count = static_cast<int>(fan.size());
      pv.occluded = pv.hit_count < budget.epsilon;
      if (pv.occluded) {
        int best = 0;
        for (const auto& [id, count] : blocked)
          if (count > best) {
            best = count;
            pv.occluder = id;
          }
      }
      report.set(obs.id, tgt.id, pv);
    }
  }
  return report;
}

void write_visibility_dump(const Scene& scene, const RayBudget& budget, const std::filesystem::path& dir,
                           const std::string& stem) {
  std::filesystem::create_directories(dir);
  const auto grid = rasterize(scene, budget.cell_size, budget.max_cells);
  const auto pgm = dir / (stem + ".pgm");
  {
    std::ofstream out(pgm, std::ios::binary);
    if (!out) throw IoError(pgm.string(), "cannot write");
    out << "P5\n" << grid.width() << ' ' << grid.height() << "\n255\n";
    for (long long r = grid.height() - 1; r >= 0; --r)
      for (long long x = 0; x < grid.width(); ++x) {
        const VehicleId v = grid.at({grid.origin().ix + x, grid.origin().iy + r});
        out.put(static_cast<char>(v == OccupancyGrid::kEmpty ? 255 : 0));
      }
  }
  std::vector<RaySample> rays;
  const auto report = occlusion_indicator(scene, budget, nullptr, &rays);
  nlohmann::json j;
  j["cell_size"] = grid.cell_size();
  j["origin"] = {static_cast<double>(grid.origin().ix) * grid.cell_size(),
                 static_cast<double>(grid.origin().iy) * grid.cell_size()};
  j["rays"] = nlohmann::json::array();
  for (const auto& r : rays) {
    const Vec2d d = (r.end - r.origin).normalized();
    nlohmann::json rj{{"observer", r.observer},
                      {"target", r.target},
                      {"origin", {r.origin.x(), r.origin.y()}},
                      {"direction", {d.x(), d.y()}},
                      {"end", {r.end.x(), r.end.y()}}};
    rj["first_hit"] = r.first_hit ? nlohmann::json(*r.first_hit) : nlohmann::json(nullptr);
    j["rays"].push_back(rj);
  }
  j["pairs"] = nlohmann::json::array();
  for (const auto& [key, pv] : report.pairs()) {
    nlohmann::json pj{{"observer", key.first}, {"target", key.second}, {"rays", pv.ray_count},
                      {"hits", pv.hit_count},  {"occluded", pv.occluded}};
    pj["occluder"] = pv.occluder ? nlohmann::json(*pv.occluder) : nlohmann::json(nullptr);
    j["pairs"].push_back(pj);
  }
  const auto path = dir / (stem + "_rays.json");
  std::ofstream out(path);
  if (!out) throw IoError(path.string(), "cannot write");
  out << j.dump(1) << '\n';
}

}  // namespace hocc
