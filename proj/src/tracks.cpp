#include "hocc/tracks.hpp"

#include "hocc/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

namespace hocc {

namespace {

constexpr double kTimeTolerance = 1e-6;

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      auto f = line.substr(start, i - start);
      while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
      while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
      out.push_back(f);
      start = i + 1;
    }
  }
  return out;
}

std::optional<double> parse_number(std::string_view f) {
  if (f.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v))
    throw std::invalid_argument("bad number '" + std::string(f) + "'");
  return v;
}

struct Row {
  std::size_t line = 0;
  VehicleId id = 0;
  double t = 0;
  VehicleState s;
  bool has_v = false;
  bool has_a = false;
  std::optional<int> lane;
};

Vec2d rotate_to_body(const Vec2d& w, double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  // body = (lateral, longitudinal)
  return {-w.x() * s + w.y() * c, w.x() * c + w.y() * s};
}

std::vector<Vec2d> differentiate(const std::vector<Vec2d>& v, double dt) {
  const std::size_t n = v.size();
  std::vector<Vec2d> d(n, Vec2d::Zero());
  if (n < 2) return d;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0)
      d[k] = (v[1] - v[0]) / dt;
    else if (k + 1 == n)
      d[k] = (v[n - 1] - v[n - 2]) / dt;
    else
      d[k] = (v[k + 1] - v[k - 1]) / (2 * dt);
  }
  return d;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

bool TrackDataset::operator==(const TrackDataset& o) const {
  if (dt != o.dt || tracks.size() != o.tracks.size()) return false;
  for (const auto& [id, t] : tracks) {
    auto it = o.tracks.find(id);
    if (it == o.tracks.end()) return false;
    const auto& u = it->second;
    if (t.lane != u.lane || t.times != u.times || t.states != u.states) return false;
  }
  return true;
}

TrackDataset parse_tracks_csv(const std::string& text, const LaneMap& map, const IngestOptions& opts,
                              const std::string& source) {
  TrackDataset ds;
  std::optional<double> dt;
  std::vector<std::string> columns;
  std::vector<Row> rows;

  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line(raw);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto pos = line.find("dt=");
      if (pos != std::string_view::npos) {
        try {
          dt = parse_number(line.substr(pos + 3));
        } catch (const std::exception&) {
          throw ParseError(source, lineno, "malformed dt header");
        }
        if (!dt || !(*dt > 0)) throw ParseError(source, lineno, "dt must be positive");
      }
      continue;
    }
    if (columns.empty()) {
      for (auto f : split(line, ',')) columns.emplace_back(f);
      for (const char* req : {"track_id", "t", "x", "y", "yaw"})
        if (std::find(columns.begin(), columns.end(), req) == columns.end())
          throw ParseError(source, lineno, std::string("missing required column ") + req);
      continue;
    }

    auto fields = split(line, ',');
    if (fields.size() != columns.size())
      throw ParseError(source, lineno,
                       "expected " + std::to_string(columns.size()) + " fields, got " + std::to_string(fields.size()));
    Row r;
    r.line = lineno;
    std::optional<double> vx, vy, ax, ay;
    try {
      for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto& name = columns[c];
        const auto f = fields[c];
        if (name == "track_id") {
          auto v = parse_number(f);
          if (!v || *v != std::floor(*v)) throw std::invalid_argument("track_id must be an integer");
          r.id = static_cast<VehicleId>(*v);
        } else if (name == "lane_id") {
          if (auto v = parse_number(f)) r.lane = static_cast<int>(*v);
        } else {
          auto v = parse_number(f);
          if (name == "vx") vx = v;
          else if (name == "vy") vy = v;
          else if (name == "ax") ax = v;
          else if (name == "ay") ay = v;
          else if (!v) throw std::invalid_argument("empty required field " + name);
          else if (name == "t") r.t = *v;
          else if (name == "x") r.s.x = *v;
          else if (name == "y") r.s.y = *v;
          else if (name == "yaw") r.s.yaw = wrap_angle(*v);
        }
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, lineno, e.what());
    }
    if (vx.has_value() != vy.has_value()) throw ParseError(source, lineno, "vx and vy must be given together");
    if (ax.has_value() != ay.has_value()) throw ParseError(source, lineno, "ax and ay must be given together");
    if (vx) {
      r.has_v = true;
      r.s.vx = *vx;
      r.s.vy = *vy;
    }
    if (ax) {
      r.has_a = true;
      r.s.ax = *ax;
      r.s.ay = *ay;
    }
    rows.push_back(r);
  }

  if (!dt) {
    if (!rows.empty()) throw ParseError(source, 1, "missing '# dt=<seconds>' header");
    return ds;
  }
  ds.dt = *dt;

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].id == rows[i].id) ++j;

    Track track;
    track.id = rows[i].id;
    for (std::size_t k = i; k < j; ++k) {
      if (k > i && std::abs(rows[k].t - rows[k - 1].t - ds.dt) > kTimeTolerance)
        throw ParseError(source, rows[k].line, "timestamps of track " + std::to_string(track.id) +
                                                   " are not strictly increasing at dt");
      if (rows[k].lane && rows[i].lane && *rows[k].lane != *rows[i].lane)
        throw ParseError(source, rows[k].line, "track changes lane_id");
    }

    // Lane assignment: the declared lane, else the nearest path overall.
    std::vector<int> candidates;
    if (rows[i].lane) {
      if (!map.has_lane(*rows[i].lane)) throw ParseError(source, rows[i].line, "unknown lane_id");
      candidates.push_back(*rows[i].lane);
    } else {
      for (const auto& l : map.lanes()) candidates.push_back(l.id());
    }
    double best_mean = std::numeric_limits<double>::infinity();
    for (int lane : candidates) {
      double worst = 0, sum = 0;
      std::size_t worst_line = rows[i].line;
      for (std::size_t k = i; k < j; ++k) {
        const double d = map.lane(lane).project(rows[k].s.position()).distance;
        sum += d;
        if (d > worst) {
          worst = d;
          worst_line = rows[k].line;
        }
      }
      if (worst > opts.max_lane_distance) {
        if (candidates.size() == 1)
          throw UnmappableTrackError(source + ":" + std::to_string(worst_line) + ": track " +
                                     std::to_string(track.id) + " is farther than " +
                                     format_double(opts.max_lane_distance) + " m from lane " + std::to_string(lane));
        continue;
      }
      if (sum / static_cast<double>(j - i) < best_mean) {
        best_mean = sum / static_cast<double>(j - i);
        track.lane = lane;
      }
    }
    if (track.lane < 0)
      throw UnmappableTrackError(source + ":" + std::to_string(rows[i].line) + ": track " + std::to_string(track.id) +
                                 " is farther than " + format_double(opts.max_lane_distance) +
                                 " m from every centerline");

    std::vector<Vec2d> pos;
    for (std::size_t k = i; k < j; ++k) {
      track.times.push_back(rows[k].t);
      track.states.push_back(rows[k].s);
      pos.push_back(rows[k].s.position());
    }
    const auto vel = differentiate(pos, ds.dt);
    std::vector<Vec2d> world_vel(vel.size());
    for (std::size_t k = 0; k < track.states.size(); ++k) {
      auto& s = track.states[k];
      if (!rows[i + k].has_v) {
        const Vec2d b = rotate_to_body(vel[k], s.yaw);
        s.vx = b.x();
        s.vy = b.y();
      }
      world_vel[k] = s.world_velocity();
    }
    const auto acc = differentiate(world_vel, ds.dt);
    for (std::size_t k = 0; k < track.states.size(); ++k) {
      auto& s = track.states[k];
      if (!rows[i + k].has_a) {
        const Vec2d b = rotate_to_body(acc[k], s.yaw);
        s.ax = b.x();
        s.ay = b.y();
      }
      if (s.speed() > opts.max_speed + 1e-9)
        throw ParseError(source, rows[i + k].line, "speed " + format_double(s.speed()) + " exceeds v_max");
    }
    ds.tracks.emplace(track.id, std::move(track));
    i = j;
  }
  return ds;
}

TrackDataset ingest_tracks(const std::filesystem::path& path, const LaneMap& map, const IngestOptions& opts) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open track file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tracks_csv(ss.str(), map, opts, path.string());
}

std::string tracks_to_csv(const TrackDataset& ds) {
  std::string out = "# dt=" + format_double(ds.dt) + "\n";
  out += "track_id,t,x,y,vx,vy,ax,ay,yaw,lane_id\n";
  for (const auto& [id, tr] : ds.tracks) {
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
      const auto& s = tr.states[k];
      out += std::to_string(id);
      for (double v : {tr.times[k], s.x, s.y, s.vx, s.vy, s.ax, s.ay, s.yaw}) {
        out += ',';
        out += format_double(v);
      }
      out += ',' + std::to_string(tr.lane) + '\n';
    }
  }
  return out;
}

TrackDataset resample(const TrackDataset& ds, double dt) {
  if (std::abs(ds.dt - dt) < 1e-12) return ds;
  TrackDataset out;
  out.dt = dt;
  for (const auto& [id, tr] : ds.tracks) {
    Track r;
    r.id = id;
    r.lane = tr.lane;
    if (tr.times.empty()) continue;
    const double t0 = tr.times.front(), t1 = tr.times.back();
    const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9)) + 1;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = t0 + static_cast<double>(k) * dt;
      const double u = (t - t0) / ds.dt;
      const std::size_t i = std::min(static_cast<std::size_t>(std::floor(u)), tr.states.size() - 1);
      const std::size_t j = std::min(i + 1, tr.states.size() - 1);
      const double w = i == j ? 0.0 : u - static_cast<double>(i);
      const auto& a = tr.states[i];
      const auto& b = tr.states[j];
      VehicleState s;
      s.x = a.x + w * (b.x - a.x);
      s.y = a.y + w * (b.y - a.y);
      s.vx = a.vx + w * (b.vx - a.vx);
      s.vy = a.vy + w * (b.vy - a.vy);
      s.ax = a.ax + w * (b.ax - a.ax);
      s.ay = a.ay + w * (b.ay - a.ay);
      s.yaw = wrap_angle(a.yaw + w * wrap_angle(b.yaw - a.yaw));
      r.times.push_back(t);
      r.states.push_back(s);
    }
    out.tracks.emplace(id, std::move(r));
  }
  return out;
}

}  // namespace hocc
