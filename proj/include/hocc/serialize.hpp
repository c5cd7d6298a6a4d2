#pragma once

// JSON forms of scenes and OCC records. Numbers are written in shortest
// round-trip form and object keys in fixed order, so equal values always
// produce equal bytes.

#include "hocc/hypergame.hpp"
#include "hocc/scene.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace hocc {

nlohmann::ordered_json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);

/// One compact JSON object per line.
std::string scenes_to_jsonl(const std::vector<Scene>& scenes);
std::vector<Scene> scenes_from_jsonl(const std::string& text, const std::string& source = "<scenes>");

/// Record without the sampled trajectories; chosen maneuvers are kept.
nlohmann::ordered_json occ_record_to_json(const OccRecord& r);
/// Inverse of occ_record_to_json; trajectory samples are not restored.
OccRecord occ_record_from_json(const nlohmann::json& j);

std::string occ_records_to_jsonl(const std::vector<OccRecord>& records);
std::vector<OccRecord> occ_records_from_jsonl(const std::string& text, const std::string& source = "<records>");

}  // namespace hocc
