// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

// JSON forms of cameras, templates, mixtures, scenes, configs and reports.
// Malformed documents raise ErrorCode::kFormat; unreadable files kIo.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenemock/geometry.hpp"
#include "scenemock/harness.hpp"
#include "scenemock/metrics.hpp"
#include "scenemock/scene_stats.hpp"
#include "scenemock/selection.hpp"
#include "scenemock/shape_model.hpp"

namespace scenemock {

using Json = nlohmann::ordered_json;

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const Json& doc);
/// Parses text, mapping syntax errors to kFormat.
Json parse_json(const std::string& text);

Json to_json(const Camera& camera);
Camera camera_from_json(const Json& j);

Json to_json(const OrientedBox& box);
OrientedBox box_from_json(const Json& j);

/// JSON array of {id, keypoints: [[x, y, z] x N_k]}.
Json database_to_json(std::span<const KeypointSet> database);
std::vector<KeypointSet> database_from_json(const Json& j);

Json to_json(const TemplateModel& model);
TemplateModel template_from_json(const Json& j);

Json to_json(const PairwiseGmm& gmm);
PairwiseGmm gmm_from_json(const Json& j);

Json to_json(const PlacementParams& params);
PlacementParams placement_from_json(const Json& j);

/// {"objects": [...], "occluders": [...]}.
Json to_json(const Scene& scene);
Scene scene_from_json(const Json& j);

/// {"camera", "scenes": [...]}.
Json scenes_to_json(std::span<const Scene> scenes, const Camera& camera);
std::vector<Scene> scenes_from_json(const Json& j);

/// {"objects": [{translation, azimuth, scale, deform, model_id, box, iteration}],
///  "camera", "iterations_used"}.
Json to_json(const InferredScene& scene, const Camera& camera);

/// Reads either a single scene document or entry `index` of a scenes file.
/// Objects need a box and an azimuth.
EvalScene eval_scene_from_json(const Json& j, int index = 0);

Json to_json(const MeasureReport& report);
std::string sweep_csv(std::span<const SweepPoint> points);

/// Missing keys keep the ArrangementSpec defaults (or those of `base`).
ArrangementSpec arrangement_from_json(const Json& j, const ArrangementSpec& base = {});
Json to_json(const ArrangementSpec& spec);

/// Missing keys keep their ExperimentConfig::defaults() values.
ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& config);

Json to_json(const ExperimentReport& report, const ExperimentConfig& config);
/// One row per (bin, condition, measure).
std::string experiment_csv(const ExperimentReport& report);
/// One row per (bin, condition, tau_j, tau_theta).
std::string experiment_sweep_csv(const ExperimentReport& report);

Json to_json(const TuneResult& result);

}  // namespace scenemock
