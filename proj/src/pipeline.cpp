#include "hocc/pipeline.hpp"

#include "hocc/error.hpp"
#include "hocc/serialize.hpp"
#include "hocc/situations.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace hocc {

namespace fs = std::filesystem;

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& f) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<Scene> extract_stage(const TrackDataset& ds, const LaneMap& map, const RunConfig& cfg) {
  auto scenes = extract_situations(ds, map);
  for (auto& s : scenes)
    for (auto& v : s.vehicles) v.footprint = {cfg.vehicle_length, cfg.vehicle_width};
  if (cfg.limit_scenes > 0 && scenes.size() > cfg.limit_scenes) scenes.resize(cfg.limit_scenes);
  return scenes;
}

std::vector<Scene> scan_stage(const std::vector<Scene>& scenes, const RunConfig& cfg) {
  const auto budget = cfg.ray_budget();
  const auto hit = parallel_map<char>(scenes.size(), cfg.jobs, [&](std::size_t i) {
    return static_cast<char>(occlusion_indicator(scenes[i], budget).any_occlusion());
  });
  std::vector<Scene> out;
  for (std::size_t i = 0; i < scenes.size(); ++i)
    if (hit[i]) out.push_back(scenes[i]);
  return out;
}

std::vector<Scene> inject_stage(const std::vector<Scene>& scenes, const LaneMap& map, const InjectionConfig& inj,
                                const RunConfig& cfg) {
  const auto budget = cfg.ray_budget();
  auto per_scene = parallel_map<std::vector<Scene>>(
      scenes.size(), cfg.jobs, [&](std::size_t i) { return search_scene(scenes[i], i, map, inj, budget); });
  std::vector<Scene> out;
  for (auto& v : per_scene)
    for (auto& s : v) out.push_back(std::move(s));
  return out;
}

SceneVerdict validate_scene(const Scene& scene, const LaneMap& map, const RunConfig& cfg) {
  SceneVerdict v;
  if (auto bad = check_scene(scene)) {
    v.skipped = *bad;
    return v;
  }
  try {
    const auto budget = cfg.ray_budget();
    const auto params = cfg.hypergame_params();
    const auto report = occlusion_indicator(scene, budget);
    const auto h = build_hypergame(scene, report, map, params);
    const auto dor = compute_dor(h);
    v.dor = dor.dor;
    auto rec = classify_occ(h, dor, cfg.theta, map);
    if (!rec) return v;
    v.occ_candidate = true;
    if (apply_resolution_check(*rec, budget, params.motion)) v.record = std::move(rec);
  } catch (const DegeneratePlayerError& e) {
    v.skipped = e.what();
  }
  return v;
}

ValidationOutcome validate_stage(const std::vector<Scene>& scenes, const LaneMap& map, const RunConfig& cfg) {
  auto verdicts = parallel_map<SceneVerdict>(scenes.size(), cfg.jobs,
                                             [&](std::size_t i) { return validate_scene(scenes[i], map, cfg); });
  ValidationOutcome out;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    auto& v = verdicts[i];
    if (v.skipped) out.skipped.emplace_back(scenes[i].id, *v.skipped);
    if (v.occ_candidate) ++out.occ_candidates;
    if (v.record) out.records.push_back(std::move(*v.record));
  }
  return out;
}

std::string Manifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["out"] = out_dir.string();
  nlohmann::ordered_json files_j = nlohmann::ordered_json::array();
  for (const auto& f : files) files_j.push_back((out_dir / f).string());
  j["files"] = std::move(files_j);
  return j.dump(2);
}

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string(), "cannot open for writing");
  f << text;
  if (!f) throw IoError(path.string(), "write failed");
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

namespace {

struct Loaded {
  LaneMap map;
  std::optional<TrackDataset> tracks;
};

Loaded load_inputs(const PipelineInputs& in, const RunConfig& cfg, bool need_tracks) {
  Loaded l;
  if (in.map.empty()) throw Error("a lane map is required (--map)");
  l.map = load_map(in.map);
  if (!in.tracks.empty()) l.tracks = ingest_tracks(in.tracks, l.map, cfg.ingest_options());
  else if (need_tracks) throw Error("a track file is required (--tracks)");
  return l;
}

std::vector<Scene> input_scenes(const PipelineInputs& in, const Loaded& l, const RunConfig& cfg) {
  if (in.scenes) {
    auto scenes = scenes_from_jsonl(read_text(*in.scenes), in.scenes->string());
    if (cfg.limit_scenes > 0 && scenes.size() > cfg.limit_scenes) scenes.resize(cfg.limit_scenes);
    return scenes;
  }
  if (!l.tracks) throw Error("either --tracks or --scenes is required");
  return extract_stage(*l.tracks, l.map, cfg);
}

SpeedSampler sampler(const Loaded& l) { return l.tracks ? SpeedSampler::from_dataset(*l.tracks) : SpeedSampler{}; }

class Writer {
 public:
  Writer(std::string command, fs::path out) { manifest_.command = std::move(command), manifest_.out_dir = std::move(out); }
  void put(const fs::path& rel, const std::string& text) {
    write_text(manifest_.out_dir / rel, text);
    manifest_.files.push_back(rel);
  }
  void add(const std::vector<fs::path>& rels) {
    manifest_.files.insert(manifest_.files.end(), rels.begin(), rels.end());
  }
  Manifest finish() {
    put("manifest.json", manifest_.to_json() + "\n");
    return manifest_;
  }

 private:
  Manifest manifest_;
};

std::string skipped_text(const ValidationOutcome& v) {
  std::string out;
  for (const auto& [id, why] : v.skipped) out += id + "\t" + why + "\n";
  return out;
}

std::size_t count_lines(const fs::path& p) {
  if (!fs::exists(p)) return 0;
  const auto text = read_text(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

Manifest run_ingest(const PipelineInputs& in, const RunConfig& cfg) {
  const auto l = load_inputs(in, cfg, true);
  Writer w("ingest", in.out);
  w.put("tracks.csv", tracks_to_csv(*l.tracks));
  w.put("speed_histograms.json", speed_sampler_to_json(sampler(l)) + "\n");
  return w.finish();
}

Manifest run_extract(const PipelineInputs& in, const RunConfig& cfg) {
  const auto l = load_inputs(in, cfg, true);
  Writer w("extract", in.out);
  w.put("situations.jsonl", scenes_to_jsonl(extract_stage(*l.tracks, l.map, cfg)));
  return w.finish();
}

Manifest run_scan(const PipelineInputs& in, const RunConfig& cfg) {
  const auto l = load_inputs(in, cfg, false);
  const auto scenes = input_scenes(in, l, cfg);
  Writer w("scan", in.out);
  w.put("occlusion_scenes.jsonl", scenes_to_jsonl(scan_stage(scenes, cfg)));
  return w.finish();
}

Manifest run_inject(const PipelineInputs& in, const RunConfig& cfg) {
  const auto l = load_inputs(in, cfg, false);
  const auto scenes = input_scenes(in, l, cfg);
  const auto inj = cfg.injection_config(sampler(l));
  Writer w("inject", in.out);
  w.put("speed_histograms.json", speed_sampler_to_json(inj.speeds) + "\n");
  w.put("occlusion_scenes.jsonl", scenes_to_jsonl(inject_stage(scenes, l.map, inj, cfg)));
  return w.finish();
}

Manifest run_validate(const PipelineInputs& in, const RunConfig& cfg) {
  const auto l = load_inputs(in, cfg, false);
  PipelineInputs src = in;
  if (!src.scenes && src.tracks.empty() && fs::exists(in.out / "occlusion_scenes.jsonl"))
    src.scenes = in.out / "occlusion_scenes.jsonl";
  const auto scenes = input_scenes(src, l, cfg);
  const auto v = validate_stage(scenes, l.map, cfg);
  Writer w("validate", in.out);
  w.put("occ_records.jsonl", occ_records_to_jsonl(v.records));
  w.put("skipped.tsv", skipped_text(v));
  return w.finish();
}

Manifest run_analyze(const PipelineInputs& in, const RunConfig& cfg) {
  std::optional<LaneMap> map;
  if (!in.map.empty()) map = load_map(in.map);
  auto records_in = [&](const fs::path& p) {
    return fs::exists(p) ? occ_records_from_jsonl(read_text(p), p.string()) : std::vector<OccRecord>{};
  };
  const auto records = records_in(in.out / "occ_records.jsonl");
  const auto baseline = records_in(in.out / "baseline" / "occ_records.jsonl");
  PassCounts aug{count_lines(in.out / "situations.jsonl"), count_lines(in.out / "occlusion_scenes.jsonl"), 0};
  PassCounts base{aug.situations, count_lines(in.out / "baseline" / "occlusion_scenes.jsonl"), 0};
  auto report = aggregate(records, aug, baseline, base);
  report.skipped_scenes = count_lines(in.out / "skipped.tsv") + count_lines(in.out / "baseline" / "skipped.tsv");
  report.parameters = config_to_json(cfg);
  Writer w("analyze", in.out);
  w.add(emit_plots(report, records, map ? &*map : nullptr, in.out));
  return w.finish();
}

Manifest run_pipeline(const PipelineInputs& in, const RunConfig& cfg) {
  cfg.validate();
  Writer w("run", in.out);
  try {
    std::error_code ec;
    fs::remove(in.out / "FAILED", ec);
    w.put("config.toml", config_to_text(cfg));
    const auto l = load_inputs(in, cfg, false);
    if (l.tracks) w.put("tracks.csv", tracks_to_csv(*l.tracks));
    const auto situations = input_scenes(in, l, cfg);
    w.put("situations.jsonl", scenes_to_jsonl(situations));

    // Baseline: naturalistic occlusions only.
    const auto base_scenes = scan_stage(situations, cfg);
    w.put("baseline/occlusion_scenes.jsonl", scenes_to_jsonl(base_scenes));
    const auto base = validate_stage(base_scenes, l.map, cfg);
    w.put("baseline/occ_records.jsonl", occ_records_to_jsonl(base.records));
    w.put("baseline/skipped.tsv", skipped_text(base));

    // Augmented: occlusion-guided injection.
    const auto inj = cfg.injection_config(sampler(l));
    w.put("speed_histograms.json", speed_sampler_to_json(inj.speeds) + "\n");
    const auto occ_scenes = inject_stage(situations, l.map, inj, cfg);
    w.put("occlusion_scenes.jsonl", scenes_to_jsonl(occ_scenes));
    const auto aug = validate_stage(occ_scenes, l.map, cfg);
    w.put("occ_records.jsonl", occ_records_to_jsonl(aug.records));
    w.put("skipped.tsv", skipped_text(aug));

    auto report = aggregate(aug.records, {situations.size(), occ_scenes.size(), 0}, base.records,
                            {situations.size(), base_scenes.size(), 0});
    report.skipped_scenes = aug.skipped.size() + base.skipped.size();
    report.parameters = config_to_json(cfg);
    w.add(emit_plots(report, aug.records, &l.map, in.out));
    return w.finish();
  } catch (const std::exception& e) {
    write_text(in.out / "FAILED", std::string(e.what()) + "\n");
    throw;
  }
}

}  // namespace hocc
