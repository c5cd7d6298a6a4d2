#include "hocc/serialize.hpp"

#include "hocc/error.hpp"

#include <sstream>

namespace hocc {

using ojson = nlohmann::ordered_json;
using nlohmann::json;

namespace {

ojson state_to_json(const VehicleState& s) {
  return ojson{{"x", s.x}, {"y", s.y}, {"vx", s.vx}, {"vy", s.vy}, {"ax", s.ax}, {"ay", s.ay}, {"yaw", s.yaw}};
}

VehicleState state_from_json(const json& j) {
  VehicleState s;
  s.x = j.at("x").get<double>();
  s.y = j.at("y").get<double>();
  s.vx = j.at("vx").get<double>();
  s.vy = j.at("vy").get<double>();
  s.ax = j.at("ax").get<double>();
  s.ay = j.at("ay").get<double>();
  s.yaw = j.at("yaw").get<double>();
  return s;
}

ojson vehicle_to_json(const SceneVehicle& v) {
  return ojson{{"id", v.id},
               {"lane", v.lane},
               {"role", std::string(to_string(v.role))},
               {"length", v.footprint.length},
               {"width", v.footprint.width},
               {"state", state_to_json(v.state)}};
}

SceneVehicle vehicle_from_json(const json& j) {
  SceneVehicle v;
  v.id = j.at("id").get<VehicleId>();
  v.lane = j.at("lane").get<int>();
  v.role = role_from_string(j.at("role").get<std::string>());
  v.footprint.length = j.at("length").get<double>();
  v.footprint.width = j.at("width").get<double>();
  v.state = state_from_json(j.at("state"));
  return v;
}

ojson plan_to_json(const StrategyProfile& profile, const std::vector<Trajectory>& plan) {
  ojson out = ojson::array();
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& t = plan[i];
    const auto& c = profile.choices[i];
    out.push_back(ojson{{"vehicle", t.vehicle},
                        {"maneuver", std::string(to_string(t.maneuver.kind))},
                        {"lane", t.maneuver.lane},
                        {"maneuver_index", c.maneuver},
                        {"trajectory_index", c.trajectory},
                        {"target_speed", t.target_speed},
                        {"progress", t.progress}});
  }
  return out;
}

void plan_from_json(const json& j, StrategyProfile& profile, std::vector<Trajectory>& plan) {
  for (const auto& e : j) {
    Trajectory t;
    t.vehicle = e.at("vehicle").get<VehicleId>();
    t.maneuver.kind = maneuver_kind_from_string(e.at("maneuver").get<std::string>());
    t.maneuver.lane = e.at("lane").get<int>();
    t.target_speed = e.at("target_speed").get<double>();
    t.progress = e.at("progress").get<double>();
    profile.choices.push_back(
        {t.vehicle, e.at("maneuver_index").get<std::size_t>(), e.at("trajectory_index").get<std::size_t>()});
    plan.push_back(std::move(t));
  }
}

ojson diagnostics_to_json(const SolverDiagnostics& d) {
  return ojson{{"equilibrium_count", d.equilibrium_count}, {"fallback", d.fallback}, {"tie_break", d.tie_break}};
}

SolverDiagnostics diagnostics_from_json(const json& j) {
  return {j.at("equilibrium_count").get<int>(), j.at("fallback").get<bool>(), j.at("tie_break").get<std::string>()};
}

template <typename T, typename F>
std::vector<T> parse_lines(const std::string& text, const std::string& source, F&& parse) {
  std::vector<T> out;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(source, n, e.what());
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, n, e.what());
    }
  }
  return out;
}

}  // namespace

ojson scene_to_json(const Scene& s) {
  ojson vehicles = ojson::array();
  for (const auto& v : s.vehicles) vehicles.push_back(vehicle_to_json(v));
  return ojson{{"id", s.id},
               {"time", s.time},
               {"kind", std::string(to_string(s.kind))},
               {"provenance",
                ojson{{"source", s.provenance.source}, {"candidate", s.provenance.candidate}, {"seed", s.provenance.seed}}},
               {"vehicles", std::move(vehicles)}};
}

Scene scene_from_json(const json& j) {
  Scene s;
  s.id = j.at("id").get<std::string>();
  s.time = j.at("time").get<double>();
  s.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
  const auto& p = j.at("provenance");
  s.provenance.source = p.at("source").get<std::string>();
  s.provenance.candidate = p.at("candidate").get<int>();
  s.provenance.seed = p.at("seed").get<unsigned long long>();
  for (const auto& v : j.at("vehicles")) s.vehicles.push_back(vehicle_from_json(v));
  return s;
}

std::string scenes_to_jsonl(const std::vector<Scene>& scenes) {
  std::string out;
  for (const auto& s : scenes) out += scene_to_json(s).dump() + "\n";
  return out;
}

std::vector<Scene> scenes_from_jsonl(const std::string& text, const std::string& source) {
  return parse_lines<Scene>(text, source, [](const json& j) { return scene_from_json(j); });
}

ojson occ_record_to_json(const OccRecord& r) {
  ojson visible = ojson::object();
  for (const auto& [v, ids] : r.visible) visible[std::to_string(v)] = ids;
  ojson impact_vehicles = ojson::array();
  for (const auto& v : r.impact.vehicles) impact_vehicles.push_back(vehicle_to_json(v));
  const auto& d = r.dor_result;
  return ojson{
      {"scene", scene_to_json(r.scene)},
      {"visible", std::move(visible)},
      {"dor", d.dor},
      {"s_resolved", d.s_resolved},
      {"s_naive", d.s_naive},
      {"naive_plan", plan_to_json(d.naive_profile, d.naive_plan)},
      {"naive_diagnostics", diagnostics_to_json(d.naive_profile.diagnostics)},
      {"resolved_plan", plan_to_json(d.resolved_profile, d.resolved_plan)},
      {"resolved_diagnostics", diagnostics_to_json(d.resolved_profile.diagnostics)},
      {"impact",
       ojson{{"frame", r.impact.frame},
             {"time", r.impact.time},
             {"pair", {r.impact.a, r.impact.b}},
             {"clearance", r.impact.clearance},
             {"relative_speed", r.impact.relative_speed},
             {"vehicles", std::move(impact_vehicles)}}},
      {"occluder", r.occluder ? ojson(*r.occluder) : ojson(nullptr)},
      {"resolution_time", r.resolution_time},
      {"resolution_to_impact", r.resolution_to_impact},
      {"resolved_before_impact", r.resolved_before_impact},
      {"severity", std::string(to_string(r.severity))},
      {"collision_type", std::string(to_string(r.collision_type))},
      {"tagging_on", r.tagging_on}};
}

OccRecord occ_record_from_json(const json& j) {
  OccRecord r;
  r.scene = scene_from_json(j.at("scene"));
  for (const auto& [k, ids] : j.at("visible").items()) r.visible[std::stoi(k)] = ids.get<std::vector<VehicleId>>();
  auto& d = r.dor_result;
  d.dor = j.at("dor").get<double>();
  d.s_resolved = j.at("s_resolved").get<double>();
  d.s_naive = j.at("s_naive").get<double>();
  plan_from_json(j.at("naive_plan"), d.naive_profile, d.naive_plan);
  d.naive_profile.diagnostics = diagnostics_from_json(j.at("naive_diagnostics"));
  plan_from_json(j.at("resolved_plan"), d.resolved_profile, d.resolved_plan);
  d.resolved_profile.diagnostics = diagnostics_from_json(j.at("resolved_diagnostics"));
  const auto& im = j.at("impact");
  r.impact.frame = im.at("frame").get<std::size_t>();
  r.impact.time = im.at("time").get<double>();
  r.impact.a = im.at("pair").at(0).get<VehicleId>();
  r.impact.b = im.at("pair").at(1).get<VehicleId>();
  r.impact.clearance = im.at("clearance").get<double>();
  r.impact.relative_speed = im.at("relative_speed").get<double>();
  for (const auto& v : im.at("vehicles")) r.impact.vehicles.push_back(vehicle_from_json(v));
  if (!j.at("occluder").is_null()) r.occluder = j.at("occluder").get<VehicleId>();
  r.resolution_time = j.at("resolution_time").get<double>();
  r.resolution_to_impact = j.at("resolution_to_impact").get<double>();
  r.resolved_before_impact = j.at("resolved_before_impact").get<bool>();
  r.severity = severity_from_string(j.at("severity").get<std::string>());
  r.collision_type = collision_type_from_string(j.at("collision_type").get<std::string>());
  r.tagging_on = j.at("tagging_on").get<bool>();
  return r;
}

std::string occ_records_to_jsonl(const std::vector<OccRecord>& records) {
  std::string out;
  for (const auto& r : records) out += occ_record_to_json(r).dump() + "\n";
  return out;
}

std::vector<OccRecord> occ_records_from_jsonl(const std::string& text, const std::string& source) {
  return parse_lines<OccRecord>(text, source, [](const json& j) { return occ_record_from_json(j); });
}

}  // namespace hocc
