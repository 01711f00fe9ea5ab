// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scenemock/geometry.hpp"
#include "scenemock/keypoint_maps.hpp"
#include "scenemock/metrics.hpp"
#include "scenemock/scene_stats.hpp"
#include "scenemock/selection.hpp"
#include "scenemock/shape_model.hpp"

namespace scenemock {

/// Procedural chair keypoints with varied width, depth, seat height, back
/// height and back tilt. Ids are "chair_000", "chair_001", ...
std::vector<KeypointSet> generate_chair_database(int count, std::uint64_t seed);

/// kMixed cycles through the other four layouts by scene index.
enum class Layout { kRow, kFacingPairs, kRingAroundTable, kRandomScatter, kMixed };

const char* layout_name(Layout layout);
Layout parse_layout(const std::string& name);

struct ArrangementSpec {
  Layout layout = Layout::kRow;
  int min_count = 1;
  int max_count = 6;
  double spacing = 0.8;           // meters between neighbouring centers
  double spacing_jitter = 0.0;    // std of per-object position noise
  double azimuth_jitter = 0.0;    // std of per-object azimuth noise, radians
  double azimuth_range = 0.6;     // base azimuth drawn from [-range, range]
  double deform_shrink = 0.5;     // per-mode std = sqrt(eigenvalue) * shrink
  double depth = 4.0;             // distance of the arrangement center along z
  std::uint64_t seed = 1;
};

struct SceneObject {
  PlacementParams params;
  std::string model_id;
  OrientedBox box;
};

struct Scene {
  std::vector<SceneObject> objects;
  /// Boxes that are never rendered but block view rays.
  std::vector<OrientedBox> occluders;
};

/// Deterministic per spec.seed. Objects never intersect (shrink 1.0) and
/// every keypoint projects inside the map of `camera`.
std::vector<Scene> generate_scenes(const ArrangementSpec& spec, int n,
                                   const TemplateModel& model, const Camera& camera);

/// True when no two boxes intersect (shrink 1.0) and every object keypoint
/// is inside the map.
bool validate_scene(const Scene& scene, const TemplateModel& model, const Camera& camera);

EvalScene to_eval_scene(const Scene& scene);
EvalScene to_eval_scene(const InferredScene& scene);

/// Map positions of every object's keypoints, by object then type.
std::vector<std::vector<Vec2>> project_scene(const Scene& scene, const TemplateModel& model,
                                             const Camera& camera);

enum class OcclusionMode { kAll, kOne };

struct Degradation {
  double drop_min = 0.0;
  double drop_max = 0.0;
  OcclusionMode mode = OcclusionMode::kAll;
};

/// Renders the scene's maps after dropping keypoints. The drop fraction is
/// drawn from [drop_min, drop_max]; in kOne mode only one random object is
/// degraded.
KeypointMapStack render_scene(const Scene& scene, const TemplateModel& model,
                              const Camera& camera, double sigma,
                              const Degradation& degradation, std::uint64_t seed);

struct HyperParams {
  double tau_m = 0.25;
  double tau_u = 0.21;
  double alpha = 0.61;
  double beta = 0.14;
};

struct OcclusionBin {
  std::string name;
  Degradation degradation;
  int scenes = 10;
};

enum class Condition { kFull, kNoPairwise, kSingleIteration };
const char* condition_name(Condition condition);

struct ExperimentConfig {
  HyperParams hyper;
  double sigma = 0.0;  // <= 0 selects default_sigma(map width)
  int max_iterations = 4;
  int database_size = 40;
  ArrangementSpec arrangement;
  int training_scenes = 200;
  int gmm_components = kDefaultMixtureComponents;
  double delta_r = kDefaultPairRadius;
  std::vector<OcclusionBin> bins;
  std::vector<Condition> conditions{Condition::kFull, Condition::kNoPairwise,
                                    Condition::kSingleIteration};
  double tau_j = kDefaultTauJ;
  double tau_theta = kDefaultTauTheta;
  int occlusion_grid = 32;
  bool sweep = false;
  std::uint64_t seed = 7;

  /// Four bins at drop fractions 0, 0.25, 0.5 and 0.75.
  static ExperimentConfig defaults();
  void validate() const;
};

struct Stat {
  double mean = 0.0;
  double std = 0.0;
  int count = 0;
};
Stat summarize(const std::vector<double>& values);

struct ConditionReport {
  Condition condition = Condition::kFull;
  // Keys: iou3d, iou2d, loc, locang; each with precision, recall, f1.
  std::vector<std::pair<std::string, Stat>> measures;
  Stat angdiff_degrees;
  Stat position_error;  // meters, over located ground-truth objects
  Stat azimuth_error;   // degrees, over located ground-truth objects
  Stat objects_found;
  /// LocAng F1 mean over scenes per sweep grid point, row-major in
  /// (tau_j, tau_theta).
  std::vector<SweepPoint> sweep;

  const Stat& measure(const std::string& key) const;
};

struct BinReport {
  std::string name;
  Degradation degradation;
  int scenes = 0;
  Stat gt_objects;
  Stat occlusion;             // bounding-box ray occlusion of gt objects
  std::vector<int> occlusion_histogram;
  std::vector<ConditionReport> conditions;
};

struct ExperimentReport {
  int template_modes = 0;
  int gmm_components = 0;
  std::vector<BinReport> bins;
};

/// Shared inputs built from the config: template, mixture and camera.
struct ExperimentAssets {
  Camera camera = Camera::harness_default();
  TemplateModel model;
  std::optional<PairwiseGmm> gmm;
};
ExperimentAssets build_assets(const ExperimentConfig& config);

InferenceOptions inference_options(const HyperParams& hyper, Condition condition,
                                   int max_iterations);

/// Per-scene result of one condition, before aggregation.
struct SceneOutcome {
  MeasureReport report;
  std::vector<double> position_errors;
  std::vector<double> azimuth_errors;
  int found = 0;
};
SceneOutcome evaluate_scene(const Scene& gt, const InferredScene& result, const Camera& camera,
                            double tau_j, double tau_theta);

ExperimentReport run_experiment(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config, const ExperimentAssets& assets);

struct TuneRange {
  double lo = 0.0;
  double hi = 1.0;
};

struct TuneSpace {
  TuneRange tau_m{0.05, 0.5};
  TuneRange tau_u{0.05, 0.5};
  TuneRange alpha{0.05, 1.0};
  TuneRange beta{0.05, 1.0};
};

struct TuneTrial {
  HyperParams hyper;
  double objective = 0.0;
};

struct TuneResult {
  HyperParams best;
  double best_objective = 0.0;
  std::vector<TuneTrial> trials;
};

/// Uniform random search maximising `objective`; ties keep the earliest trial.
TuneResult random_search(const std::function<double(const HyperParams&)>& objective,
                         int budget, std::uint64_t seed, const TuneSpace& space = {});

/// Random search of the mean full-pipeline LocAng F1 over a held-out set of
/// `held_out` scenes drawn from the config's first bin.
TuneResult tune(const ExperimentConfig& config, int budget, std::uint64_t seed,
                int held_out = 10, const TuneSpace& space = {});

}  // namespace scenemock
