#include "hocc/analysis.hpp"

#include "hocc/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace hocc {

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::S0: return "S0";
    case Severity::S1: return "S1";
    case Severity::S2: return "S2";
    case Severity::S3: return "S3";
  }
  return "S0";
}

std::string_view to_string(CollisionType t) {
  switch (t) {
    case CollisionType::front_to_front: return "front_to_front";
    case CollisionType::angle: return "angle";
    case CollisionType::sideswipe: return "sideswipe";
    case CollisionType::front_to_rear: return "front_to_rear";
  }
  return "angle";
}

Severity severity_from_string(std::string_view s) {
  for (auto v : kSeverities)
    if (to_string(v) == s) return v;
  throw Error("unknown severity class '" + std::string(s) + "'");
}

CollisionType collision_type_from_string(std::string_view s) {
  for (auto v : kCollisionTypes)
    if (to_string(v) == s) return v;
  throw Error("unknown collision type '" + std::string(s) + "'");
}

Severity severity_class(double relative_speed) {
  for (std::size_t i = 0; i < kSeverityBounds.size(); ++i)
    if (relative_speed <= kSeverityBounds[i]) return kSeverities[i];
  return Severity::S3;
}

CollisionType classify_collision(const OrientedBoxd& a, const OrientedBoxd& b) {
  const double dpsi = std::abs(wrap_angle(a.yaw - b.yaw));
  const auto pen = penetration(a, b);
  Vec2d axis = pen.axis;
  if (!pen.overlapping) {
    const Vec2d d = b.center - a.center;
    axis = d.norm() > 0 ? Vec2d(d.normalized()) : Vec2d(Vec2d::UnitX());
  }
  const Face fa = facing(a, axis);
  const Face fb = facing(b, Vec2d(-axis));
  const double deg = std::numbers::pi / 180.0;
  const auto side = [](Face f) { return f == Face::left || f == Face::right; };

  if (dpsi > 135 * deg && fa == Face::front && fb == Face::front) return CollisionType::front_to_front;
  if (dpsi <= 45 * deg) {
    if ((fa == Face::front && fb == Face::rear) || (fa == Face::rear && fb == Face::front))
      return CollisionType::front_to_rear;
    if (side(fa) || side(fb)) return CollisionType::sideswipe;
  }
  return CollisionType::angle;
}

Severity severity(const OccRecord& record) { return severity_class(record.impact.relative_speed); }

CollisionType collision_type(const OccRecord& record) {
  const SceneVehicle* a = nullptr;
  const SceneVehicle* b = nullptr;
  for (const auto& v : record.impact.vehicles) {
    if (v.id == record.impact.a) a = &v;
    if (v.id == record.impact.b) b = &v;
  }
  if (!a || !b) throw Error("collision_type: impact state missing a colliding vehicle");
  return classify_collision(a->box(), b->box());
}

DurationSummary summarize(const std::vector<double>& samples) {
  DurationSummary s;
  s.count = samples.size();
  if (samples.empty()) return s;
  s.min = *std::min_element(samples.begin(), samples.end());
  s.max = *std::max_element(samples.begin(), samples.end());
  double sum = 0;
  for (double x : samples) sum += x;
  s.mean = sum / static_cast<double>(samples.size());
  return s;
}

ValidationReport aggregate(const std::vector<OccRecord>& records, const PassCounts& augmented,
                           const std::vector<OccRecord>& baseline_records, const PassCounts& baseline) {
  ValidationReport r;
  r.augmented = augmented;
  r.baseline = baseline;
  r.augmented.occ_records = records.size();
  r.baseline.occ_records = baseline_records.size();
  if (r.baseline.occ_records > 0)
    r.occ_gain_percent =
        100.0 * static_cast<double>(r.augmented.occ_records) / static_cast<double>(r.baseline.occ_records);
  for (const auto& rec : records) {
    ++r.severity_histogram[static_cast<std::size_t>(rec.severity)];
    ++r.type_histogram[static_cast<std::size_t>(rec.collision_type)];
    if (rec.tagging_on) ++r.tagging_on;
    r.resolution_to_impact.push_back(rec.resolution_to_impact);
  }
  r.resolution_summary = summarize(r.resolution_to_impact);
  return r;
}

namespace {

nlohmann::json counts_json(const PassCounts& c) {
  return {{"situations", c.situations}, {"occlusion_scenes", c.occlusion_scenes}, {"occ_records", c.occ_records}};
}

}  // namespace

std::string report_to_json(const ValidationReport& r) {
  using nlohmann::json;
  json j;
  j["baseline"] = counts_json(r.baseline);
  j["augmented"] = counts_json(r.augmented);
  j["occ_gain_percent"] = r.occ_gain_percent ? json(*r.occ_gain_percent) : json(nullptr);
  json sev = json::object();
  for (auto s : kSeverities) sev[std::string(to_string(s))] = r.severity_histogram[static_cast<std::size_t>(s)];
  j["severity_histogram"] = sev;
  json typ = json::object();
  for (auto t : kCollisionTypes) typ[std::string(to_string(t))] = r.type_histogram[static_cast<std::size_t>(t)];
  j["type_histogram"] = typ;
  j["tagging_on"] = r.tagging_on;
  j["resolution_to_impact"] = {{"samples", r.resolution_to_impact},
                               {"count", r.resolution_summary.count},
                               {"min", r.resolution_summary.min},
                               {"mean", r.resolution_summary.mean},
                               {"max", r.resolution_summary.max}};
  j["skipped_scenes"] = r.skipped_scenes;
  j["severity_bounds"] = {{"S0", "[0, 5.3]"}, {"S1", "(5.3, 7.8]"}, {"S2", "(7.8, 10.3]"}, {"S3", "(10.3, inf)"},
                          {"note", "S1 upper bound closed at 7.8 so the classes partition [0, inf)"}};
  j["parameters"] = json::parse(r.parameters);
  return j.dump(2) + "\n";
}

std::string report_summary(const ValidationReport& r) {
  std::ostringstream os;
  auto line = [&](const char* name, const PassCounts& c) {
    os << name << ": situations " << c.situations << ", occlusion scenes " << c.occlusion_scenes << ", OCC records "
       << c.occ_records << "\n";
  };
  line("baseline ", r.baseline);
  line("augmented", r.augmented);
  char buf[64];
  if (r.occ_gain_percent) {
    std::snprintf(buf, sizeof buf, "%.1f%%", *r.occ_gain_percent);
    os << "OCC gain: " << buf << "\n";
  } else {
    os << "OCC gain: n/a (baseline has no OCC)\n";
  }
  os << "severity:";
  for (auto s : kSeverities) os << " " << to_string(s) << "=" << r.severity_histogram[static_cast<std::size_t>(s)];
  os << "\ncollision type:";
  for (auto t : kCollisionTypes) os << " " << to_string(t) << "=" << r.type_histogram[static_cast<std::size_t>(t)];
  os << "\ntagging on: " << r.tagging_on << "\n";
  const auto& d = r.resolution_summary;
  std::snprintf(buf, sizeof buf, "%.3f/%.3f/%.3f", d.min, d.mean, d.max);
  os << "resolution to impact (s, min/mean/max over " << d.count << "): " << buf << "\n";
  os << "skipped scenes: " << r.skipped_scenes << "\n";
  return os.str();
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

/// Fixed-size SVG canvas with a linear data-to-pixel map and labelled axes.
class Plot {
 public:
  static constexpr double kWidth = 480, kHeight = 360, kLeft = 56, kRight = 16, kTop = 32, kBottom = 44;

  Plot(std::string title, std::string xlabel, std::string ylabel, double x0, double x1, double y0, double y1)
      : x0_(x0), x1_(x1 > x0 ? x1 : x0 + 1), y0_(y0), y1_(y1 > y0 ? y1 : y0 + 1) {
    body_ << "<text x=\"" << num(kWidth / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
          << "</text>\n";
    body_ << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(kWidth - kLeft - kRight)
          << "\" height=\"" << num(kHeight - kTop - kBottom) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double xv = x0_ + (x1_ - x0_) * i / 4.0;
      const double yv = y0_ + (y1_ - y0_) * i / 4.0;
      body_ << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(kHeight - kBottom + 14)
            << "\" text-anchor=\"middle\" font-size=\"10\">" << num(xv) << "</text>\n";
      body_ << "<text x=\"" << num(kLeft - 4) << "\" y=\"" << num(py(yv) + 3)
            << "\" text-anchor=\"end\" font-size=\"10\">" << num(yv) << "</text>\n";
    }
    body_ << "<text x=\"" << num(kWidth / 2) << "\" y=\"" << num(kHeight - 8)
          << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
    body_ << "<text x=\"14\" y=\"" << num(kHeight / 2) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
          << num(kHeight / 2) << ")\">" << ylabel << "</text>\n";
  }

  double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom); }

  void polyline(const std::vector<Vec2d>& pts, const char* stroke) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) body_ << (i ? " " : "") << num(px(pts[i].x())) << "," << num(py(pts[i].y()));
    body_ << "\"/>\n";
  }
  void point(const Vec2d& p, const char* fill) {
    body_ << "<circle cx=\"" << num(px(p.x())) << "\" cy=\"" << num(py(p.y())) << "\" r=\"3\" fill=\"" << fill
          << "\"/>\n";
  }
  void bar(double x0, double x1, double h, const std::string& label) {
    body_ << "<rect x=\"" << num(px(x0)) << "\" y=\"" << num(py(h)) << "\" width=\"" << num(px(x1) - px(x0))
          << "\" height=\"" << num(py(y0_) - py(h)) << "\" fill=\"steelblue\" stroke=\"black\"/>\n";
    if (!label.empty())
      body_ << "<text x=\"" << num((px(x0) + px(x1)) / 2) << "\" y=\"" << num(kHeight - kBottom + 26)
            << "\" text-anchor=\"middle\" font-size=\"10\">" << label << "</text>\n";
  }

  std::string str() const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
       << "\" viewBox=\"0 0 " << num(kWidth) << " " << num(kHeight) << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << body_.str() << "</svg>\n";
    return os.str();
  }

 private:
  double x0_, x1_, y0_, y1_;
  std::ostringstream body_;
};

std::string scatter(const char* title, const std::vector<Vec2d>& pts, const LaneMap* map, const char* fill) {
  Vec2d lo(-30, -30), hi(30, 30);
  if (map)
    for (const auto& l : map->lanes())
      for (const auto& p : l.centerline()) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  // Equal scale on both axes.
  const double half = std::max(hi.x() - lo.x(), hi.y() - lo.y()) / 2;
  const Vec2d mid = (lo + hi) / 2;
  Plot plot(title, "x (m)", "y (m)", mid.x() - half, mid.x() + half, mid.y() - half, mid.y() + half);
  if (map) {
    for (const auto& l : map->lanes()) plot.polyline(l.centerline(), "#bbbbbb");
    auto poly = map->intersection_polygon();
    if (!poly.empty()) {
      poly.push_back(poly.front());
      plot.polyline(poly, "#888888");
    }
  }
  for (const auto& p : pts) plot.point(p, fill);
  return plot.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string(), "cannot open for writing");
  f << text;
  if (!f) throw IoError(path.string(), "write failed");
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(const ValidationReport& report, const std::vector<OccRecord>& records,
                                              const LaneMap* map, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "plots", ec);
  if (ec) throw IoError((out_dir / "plots").string(), ec.message());

  std::vector<Vec2d> occluders, impacts;
  for (const auto& r : records) {
    if (r.occluder)
      if (const auto* v = r.scene.find(*r.occluder)) occluders.push_back(v->state.position());
    for (const auto& v : r.impact.vehicles)
      if (v.id == r.impact.a || v.id == r.impact.b) impacts.push_back(v.state.position());
  }

  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::filesystem::path& rel, const std::string& text) {
    write_file(out_dir / rel, text);
    written.push_back(rel);
  };
  emit("plots/occluder_positions.svg", scatter("Occluding vehicle positions", occluders, map, "darkorange"));
  emit("plots/impact_positions.svg", scatter("Colliding vehicle positions at impact", impacts, map, "firebrick"));

  {
    double top = 1;
    for (auto c : report.severity_histogram) top = std::max(top, static_cast<double>(c));
    Plot plot("Severity classes", "class", "records", 0, 4, 0, top);
    for (std::size_t i = 0; i < 4; ++i)
      plot.bar(i + 0.1, i + 0.9, static_cast<double>(report.severity_histogram[i]),
               std::string(to_string(kSeverities[i])));
    emit("plots/severity_histogram.svg", plot.str());
  }
  {
    constexpr double kBin = 0.5;
    double hi = 6.0;
    for (double x : report.resolution_to_impact) hi = std::max(hi, std::ceil(x / kBin) * kBin);
    std::vector<double> counts(static_cast<std::size_t>(std::llround(hi / kBin)), 0.0);
    for (double x : report.resolution_to_impact) {
      auto b = static_cast<std::size_t>(std::max(0.0, std::floor(x / kBin)));
      counts[std::min(b, counts.size() - 1)] += 1;
    }
    double top = 1;
    for (double c : counts) top = std::max(top, c);
    Plot plot("Occlusion resolution to impact", "seconds", "records", 0, hi, 0, top);
    for (std::size_t b = 0; b < counts.size(); ++b)
      if (counts[b] > 0) plot.bar(b * kBin, (b + 1) * kBin, counts[b], "");
    emit("plots/resolution_to_impact.svg", plot.str());
  }
  emit("report.json", report_to_json(report));
  emit("summary.txt", report_summary(report));
  return written;
}

}  // namespace hocc
