#include "hocc/motion.hpp"

#include "hocc/error.hpp"
#include "hocc/situations.hpp"
#include "hocc/tracks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hocc {

std::string_view to_string(ManeuverKind k) {
  switch (k) {
    case ManeuverKind::proceed: return "proceed";
    case ManeuverKind::wait: return "wait";
    case ManeuverKind::track_speed: return "track_speed";
    case ManeuverKind::decelerate_to_stop: return "decelerate_to_stop";
    case ManeuverKind::follow_lead: return "follow_lead";
  }
  return "proceed";
}

ManeuverKind maneuver_kind_from_string(std::string_view s) {
  for (auto k : {ManeuverKind::proceed, ManeuverKind::wait, ManeuverKind::track_speed,
                 ManeuverKind::decelerate_to_stop, ManeuverKind::follow_lead})
    if (to_string(k) == s) return k;
  throw Error("unknown maneuver '" + std::string(s) + "'");
}

namespace {

/// Cubic Hermite segment on [0, duration], continued at constant end
/// velocity afterwards.
struct Hermite {
  double c0 = 0, c1 = 0, c2 = 0, c3 = 0;
  double duration = 0;

  static Hermite make(double p0, double v0, double p1, double v1, double tau) {
    Hermite h;
    h.duration = tau;
    h.c0 = p0;
    h.c1 = v0;
    if (tau > 0) {
      h.c2 = (3 * (p1 - p0) / tau - 2 * v0 - v1) / tau;
      h.c3 = (2 * (p0 - p1) / tau + v0 + v1) / (tau * tau);
    }
    return h;
  }

  double end_pos() const { return c0 + duration * (c1 + duration * (c2 + duration * c3)); }
  double end_vel() const { return c1 + duration * (2 * c2 + 3 * c3 * duration); }

  double pos(double t) const {
    if (t >= duration) return end_pos() + end_vel() * (t - duration);
    return c0 + t * (c1 + t * (c2 + t * c3));
  }
  double vel(double t) const {
    if (t >= duration) return end_vel();
    return c1 + t * (2 * c2 + 3 * c3 * t);
  }
  double acc(double t) const {
    if (t >= duration) return 0;
    return 2 * c2 + 6 * c3 * t;
  }

  double min_acc() const { return duration > 0 ? std::min(acc(0), 2 * c2 + 6 * c3 * duration) : 0; }
  double min_vel() const {
    double m = std::min(c1, end_vel());
    if (std::abs(c3) > 1e-15) {
      const double tv = -c2 / (3 * c3);
      if (tv > 0 && tv < duration) m = std::min(m, vel(tv));
    }
    return m;
  }
};

bool is_turning(const SceneVehicle& v, const LaneMap& map) { return map.lane(v.lane).turn() != TurnType::through; }

}  // namespace

std::vector<Maneuver> admissible_maneuvers(const SceneVehicle& v, const LaneMap& map, bool has_leader) {
  std::vector<Maneuver> out;
  if (is_turning(v, map)) {
    out.push_back({ManeuverKind::proceed, v.lane});
    out.push_back({ManeuverKind::wait, v.lane});
  } else {
    out.push_back({ManeuverKind::track_speed, v.lane});
    out.push_back({ManeuverKind::decelerate_to_stop, v.lane});
  }
  if (has_leader) out.push_back({ManeuverKind::follow_lead, v.lane});
  return out;
}

std::vector<Trajectory> generate_trajectories(VehicleId vid, const Scene& scene, const Maneuver& m, const LaneMap& map,
                                              const MotionParams& params) {
  const auto& veh = scene.at(vid);
  const auto& path = map.lane(m.lane);
  const auto proj = path.project(veh.state.position());
  const double s0 = proj.s;
  const double d0 = proj.offset;
  const double v0 = veh.state.vy;
  const double T = params.horizon;
  if (std::abs(d0) > params.max_lateral) return {};

  struct Profile {
    Hermite lon;
    double target_speed;
  };
  std::vector<Profile> profiles;
  auto stop_profile = [&](double tau) {
    if (v0 <= 0) return Profile{Hermite::make(s0, 0, s0, 0, 0), 0};
    return Profile{Hermite::make(s0, v0, s0 + 0.5 * v0 * tau, 0, tau), 0};
  };

  switch (m.kind) {
    case ManeuverKind::proceed:
    case ManeuverKind::track_speed:
      for (double f : params.speed_factors) {
        const double v_end = f * path.speed_limit();
        profiles.push_back({Hermite::make(s0, v0, s0 + 0.5 * (v0 + v_end) * T, v_end, T), v_end});
      }
      break;
    case ManeuverKind::decelerate_to_stop:
      for (double frac : params.stop_fractions) profiles.push_back(stop_profile(frac * T));
      break;
    case ManeuverKind::wait: {
      const double hold = map.hold_line(m.lane);
      for (double frac : params.stop_fractions) {
        double tau = frac * T;
        if (v0 > 0 && s0 <= hold && s0 + 0.5 * v0 * tau > hold) {
          if (hold - s0 <= 0) continue;
          tau = 2 * (hold - s0) / v0;
        }
        profiles.push_back(stop_profile(tau));
      }
      break;
    }
    case ManeuverKind::follow_lead: {
      const auto leader_id = leading_vehicle(vid, scene, map);
      if (!leader_id) return {};
      const auto& leader = scene.at(*leader_id);
      const double s_lead = lane_arclength(leader, map);
      const double v_lead = std::max(leader.state.vy, 0.0);
      const double min_gap = params.follow_standstill + 0.5 * (veh.footprint.length + leader.footprint.length);
      for (double h : params.follow_headways) {
        const double s_end = std::max(s0, s_lead + v_lead * T - min_gap - h * v_lead);
        profiles.push_back({Hermite::make(s0, v0, s_end, v_lead, T), v_lead});
      }
      break;
    }
  }

  std::vector<Trajectory> out;
  const Hermite lat = Hermite::make(d0, veh.state.vx, 0, 0, params.lateral_settle);
  const int n = params.sample_count();
  for (const auto& prof : profiles) {
    const auto& lon = prof.lon;
    if (lon.min_acc() < -params.max_decel - 1e-9) continue;
    if (lon.min_vel() < -1e-9) continue;

    Trajectory tr;
    tr.vehicle = vid;
    tr.maneuver = m;
    tr.target_speed = prof.target_speed;
    tr.footprint = veh.footprint;
    tr.samples.reserve(static_cast<std::size_t>(n));
    bool lateral_ok = true;
    for (int k = 0; k < n; ++k) {
      const double t = k * params.dt;
      if (k == 0) {
        tr.samples.push_back(veh.state);
        continue;
      }
      const double s = lon.pos(t);
      const double d = lat.pos(t);
      if (std::abs(d) > params.max_lateral + 1e-9) lateral_ok = false;
      const Vec2d tangent = path.tangent(s);
      const Vec2d normal(-tangent.y(), tangent.x());
      const Vec2d p = path.position(s) + d * normal;
      VehicleState st;
      st.x = p.x();
      st.y = p.y();
      st.vx = lat.vel(t);
      st.vy = std::max(lon.vel(t), 0.0);
      st.ax = lat.acc(t);
      st.ay = lon.acc(t);
      st.yaw = std::atan2(tangent.y(), tangent.x());
      tr.samples.push_back(st);
    }
    if (!lateral_ok) continue;
    tr.travelled.assign(tr.samples.size(), 0.0);
    for (std::size_t k = 1; k < tr.samples.size(); ++k)
      tr.travelled[k] = tr.travelled[k - 1] + (tr.samples[k].position() - tr.samples[k - 1].position()).norm();
    tr.progress = std::max(lon.pos(T) - s0, 0.0);
    out.push_back(std::move(tr));
  }
  return out;
}

double GapProfile::min() const {
  double m = std::numeric_limits<double>::infinity();
  for (double c : clearance) m = std::min(m, c);
  return m;
}

GapProfile gap_profile(const Trajectory& ta, const Trajectory& tb) {
  if (ta.samples.size() != tb.samples.size()) throw Error("gap_profile: trajectories differ in sample count");
  GapProfile g;
  g.a = ta.vehicle;
  g.b = tb.vehicle;
  g.clearance.resize(ta.samples.size());
  for (std::size_t k = 0; k < ta.samples.size(); ++k) g.clearance[k] = signed_clearance(ta.box(k), tb.box(k));
  return g;
}

double surrogate_s(const std::vector<GapProfile>& profiles) {
  if (profiles.empty()) throw Error("surrogate_s: empty profile set");
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : profiles) m = std::min(m, p.min());
  return m;
}

std::vector<GapProfile> joint_gap_profiles(const std::vector<const Trajectory*>& plan) {
  std::vector<GapProfile> out;
  for (std::size_t i = 0; i < plan.size(); ++i)
    for (std::size_t j = i + 1; j < plan.size(); ++j) out.push_back(gap_profile(*plan[i], *plan[j]));
  return out;
}

namespace {

/// State at distance `dist` along the sampled path of `tr`.
VehicleState along(const Trajectory& tr, double dist) {
  const auto& d = tr.travelled;
  if (dist <= 0) return tr.samples.front();
  if (dist >= d.back()) return tr.samples.back();
  const auto it = std::upper_bound(d.begin(), d.end(), dist);
  const std::size_t k = static_cast<std::size_t>(it - d.begin()) - 1;
  const double h = d[k + 1] - d[k];
  const double w = h > 0 ? (dist - d[k]) / h : 0;
  const auto& a = tr.samples[k];
  const auto& b = tr.samples[k + 1];
  VehicleState s = a;
  s.x = a.x + w * (b.x - a.x);
  s.y = a.y + w * (b.y - a.y);
  s.yaw = wrap_angle(a.yaw + w * wrap_angle(b.yaw - a.yaw));
  return s;
}

}  // namespace

Rollout forward_simulate(const Scene& scene, const std::vector<const Trajectory*>& plan, double until,
                         const std::optional<EmergencyBrake>& intervention, const MotionParams& params) {
  for (const auto& v : scene.vehicles) {
    const bool found = std::any_of(plan.begin(), plan.end(), [&](const Trajectory* t) { return t->vehicle == v.id; });
    if (!found) throw Error("forward_simulate: no trajectory for vehicle " + std::to_string(v.id));
  }
  const std::size_t n = plan.front()->samples.size();
  const auto last =
      std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::max(0L, std::lround(until / params.dt))));
  const long k_brake = intervention ? std::lround(intervention->from_time / params.dt) : -1;

  Rollout out;
  for (std::size_t k = 0; k <= last; ++k) {
    Scene frame = scene;
    frame.time = scene.time + static_cast<double>(k) * params.dt;
    for (auto& v : frame.vehicles) {
      const Trajectory& tr = **std::find_if(plan.begin(), plan.end(), [&](const Trajectory* t) { return t->vehicle == v.id; });
      const bool braking = intervention && static_cast<long>(k) > k_brake &&
                           std::find(intervention->vehicles.begin(), intervention->vehicles.end(), v.id) !=
                               intervention->vehicles.end();
      if (!braking) {
        v.state = tr.samples[k];
        continue;
      }
      const auto kr = static_cast<std::size_t>(std::clamp<long>(k_brake, 0, static_cast<long>(n) - 1));
      const double vr = tr.samples[kr].speed();
      const double tau = static_cast<double>(k - kr) * params.dt;
      const double a = intervention->decel;
      const double stop_time = vr / a;
      const double braked = tau < stop_time ? vr * tau - 0.5 * a * tau * tau : 0.5 * vr * vr / a;
      const double planned = tr.travelled[k] - tr.travelled[kr];
      if (planned <= braked) {
        v.state = tr.samples[k];
      } else {
        v.state = along(tr, tr.travelled[kr] + braked);
        v.state.vx = 0;
        v.state.vy = std::max(vr - a * tau, 0.0);
        v.state.ax = 0;
        v.state.ay = v.state.vy > 0 ? -a : 0;
      }
    }

    std::optional<Collision> hit;
    for (std::size_t i = 0; i < frame.vehicles.size(); ++i)
      for (std::size_t j = i + 1; j < frame.vehicles.size(); ++j) {
        const double c = signed_clearance(frame.vehicles[i].box(), frame.vehicles[j].box());
        if (c <= 0 && (!hit || c < hit->clearance))
          hit = Collision{k, frame.time, frame.vehicles[i].id, frame.vehicles[j].id, c};
      }
    out.frames.push_back(std::move(frame));
    if (hit) {
      out.collision = hit;
      break;
    }
  }
  return out;
}

std::string trajectories_to_csv(const std::vector<const Trajectory*>& plan, double dt) {
  std::string out = "vehicle_id,k,t,x,y,vx,vy,yaw\n";
  for (const auto* tr : plan)
    for (std::size_t k = 0; k < tr->samples.size(); ++k) {
      const auto& s = tr->samples[k];
      out += std::to_string(tr->vehicle) + ',' + std::to_string(k);
      for (double v : {static_cast<double>(k) * dt, s.x, s.y, s.vx, s.vy, s.yaw}) out += ',' + format_double(v);
      out += '\n';
    }
  return out;
}

}  // namespace hocc
