// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#include "scenemock/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "scenemock/error.hpp"

namespace scenemock {

namespace {

// splitmix64 finaliser, used to derive independent stream seeds.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return mix(mix(seed ^ mix(a)) ^ mix(b + 0x51ed27ULL));
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double normal(std::mt19937_64& rng, double stddev) {
  if (stddev <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, stddev)(rng);
}

}  // namespace

std::vector<KeypointSet> generate_chair_database(int count, std::uint64_t seed) {
  require(count >= 2, "chair database needs at least two models");
  std::mt19937_64 rng(seed);
  std::vector<KeypointSet> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double w = uniform(rng, 0.40, 0.56);
    const double d = uniform(rng, 0.40, 0.54);
    const double seat = uniform(rng, 0.42, 0.50);
    const double back = uniform(rng, 0.34, 0.52);
    const double tilt = uniform(rng, 0.0, 0.12);
    KeypointSet set;
    char id[32];
    std::snprintf(id, sizeof(id), "chair_%03d", i);
    set.id = id;
    set.keypoints.resize(kDefaultKeypointCount, 3);
    set.keypoints.row(kLegFrontLeft) << -w / 2, 0.0, -d / 2;
    set.keypoints.row(kLegFrontRight) << w / 2, 0.0, -d / 2;
    set.keypoints.row(kLegBackLeft) << -w / 2, 0.0, d / 2;
    set.keypoints.row(kLegBackRight) << w / 2, 0.0, d / 2;
    set.keypoints.row(kSeatBackLeft) << -w / 2, seat, d / 2;
    set.keypoints.row(kSeatBackRight) << w / 2, seat, d / 2;
    set.keypoints.row(kBackTopLeft) << -w / 2, seat + back, d / 2 + tilt;
    set.keypoints.row(kBackTopRight) << w / 2, seat + back, d / 2 + tilt;
    out.push_back(std::move(set));
  }
  return out;
}

const char* layout_name(Layout layout) {
  switch (layout) {
    case Layout::kRow: return "row";
    case Layout::kFacingPairs: return "facing_pairs";
    case Layout::kRingAroundTable: return "ring_around_table";
    case Layout::kRandomScatter: return "random_scatter";
    case Layout::kMixed: return "mixed";
  }
  return "row";
}

Layout parse_layout(const std::string& name) {
  for (Layout l : {Layout::kRow, Layout::kFacingPairs, Layout::kRingAroundTable,
                   Layout::kRandomScatter, Layout::kMixed}) {
    if (name == layout_name(l)) return l;
  }
  fail(ErrorCode::kInvalidArgument, "unknown layout: " + name);
}

namespace {

struct Nominal {
  std::vector<ObjectPose> poses;
  std::vector<OrientedBox> occluders;
};

Nominal nominal_layout(const ArrangementSpec& spec, Layout layout, int n,
                       std::mt19937_64& rng) {
  Nominal out;
  const Vec2 center(0.0, spec.depth);
  const double base = spec.azimuth_range > 0.0
                          ? uniform(rng, -spec.azimuth_range, spec.azimuth_range)
                          : 0.0;
  switch (layout) {
    case Layout::kMixed:
    case Layout::kRow:
      for (int i = 0; i < n; ++i) {
        const double offset = (i - 0.5 * (n - 1)) * spec.spacing;
        out.poses.push_back({center + rotate_ground(base, Vec2(offset, 0.0)), base});
      }
      break;
    case Layout::kFacingPairs: {
      const int pairs = (n + 1) / 2;
      const double gap = 0.9;
      for (int i = 0; i < n; ++i) {
        const int p = i / 2;
        const double x = (p - 0.5 * (pairs - 1)) * gap;
        const bool front = i % 2 == 0;
        const Vec2 local(x, front ? spec.spacing / 2 : -spec.spacing / 2);
        out.poses.push_back(
            {center + rotate_ground(base, local), wrap_angle(front ? base : base + kPi)});
      }
      break;
    }
    case Layout::kRingAroundTable: {
      const double radius = std::max(0.9, 0.65 * n / (2.0 * kPi) + 0.1);
      const double table = 0.5 * (radius - 0.3);
      for (int i = 0; i < n; ++i) {
        const double phi = wrap_angle(base + 2.0 * kPi * i / n);
        out.poses.push_back({center + radius * Vec2(std::sin(phi), std::cos(phi)), phi});
      }
      OrientedBox box;
      box.center = Vec3(center.x(), 0.375, center.y());
      box.half_extents = Vec3(table, 0.375, table);
      box.azimuth = base;
      out.occluders.push_back(box);
      break;
    }
    case Layout::kRandomScatter: {
      const double side = std::max(2.0, spec.spacing * std::sqrt(static_cast<double>(n)) * 1.6);
      for (int i = 0; i < n; ++i) {
        const Vec2 t = center + Vec2(uniform(rng, -side / 2, side / 2),
                                     uniform(rng, -side / 2, side / 2));
        out.poses.push_back({t, uniform(rng, -kPi, kPi)});
      }
      break;
    }
  }
  return out;
}

bool keypoints_in_map(const Eigen::MatrixX3d& world, const Camera& camera) {
  const double mw = camera.map_size().width;
  const double mh = camera.map_size().height;
  for (Eigen::Index i = 0; i < world.rows(); ++i) {
    const Vec3 p = world.row(i).transpose();
    if (camera.to_camera(p).z() < 0.5) return false;
    const Vec2 m = camera.project(p);
    if (m.x() < 0.5 || m.x() > mw - 0.5 || m.y() < 0.5 || m.y() > mh - 0.5) return false;
  }
  return true;
}

}  // namespace

bool validate_scene(const Scene& scene, const TemplateModel& model, const Camera& camera) {
  const auto& objs = scene.objects;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const Eigen::MatrixX3d world =
        place_keypoints(model.instantiate(objs[i].params.deform), objs[i].params);
    if (!keypoints_in_map(world, camera)) return false;
    for (std::size_t j = i + 1; j < objs.size(); ++j) {
      if (obb_intersects(objs[i].box, objs[j].box, 1.0)) return false;
    }
    for (const auto& occ : scene.occluders) {
      if (obb_intersects(objs[i].box, occ, 1.0)) return false;
    }
  }
  return true;
}

std::vector<Scene> generate_scenes(const ArrangementSpec& spec, int n,
                                   const TemplateModel& model, const Camera& camera) {
  require(n >= 1, "scene count must be at least 1");
  require(spec.min_count >= 1 && spec.min_count <= spec.max_count,
          "object count range must be non-empty");
  require(spec.spacing > 0.0, "spacing must be positive");
  require(spec.spacing_jitter >= 0.0 && spec.azimuth_jitter >= 0.0 && spec.deform_shrink >= 0.0,
          "jitter and shrink must be non-negative");
  std::mt19937_64 rng(spec.seed);
  std::vector<Scene> scenes;
  scenes.reserve(n);
  constexpr int kAttempts = 1000;
  for (int s = 0; s < n; ++s) {
    const int count = std::uniform_int_distribution<int>(spec.min_count, spec.max_count)(rng);
    const Layout layout = spec.layout == Layout::kMixed ? static_cast<Layout>(s % 4) : spec.layout;
    double jitter_scale = 1.0;
    bool placed = false;
    Scene scene;
    for (int round = 0; round < 8 && !placed; ++round) {
      for (int attempt = 0; attempt < kAttempts && !placed; ++attempt) {
        Nominal nominal = nominal_layout(spec, layout, count, rng);
        scene = Scene{};
        scene.occluders = std::move(nominal.occluders);
        for (const auto& pose : nominal.poses) {
          SceneObject obj;
          obj.params.translation =
              pose.translation + Vec2(normal(rng, spec.spacing_jitter * jitter_scale),
                                      normal(rng, spec.spacing_jitter * jitter_scale));
          obj.params.azimuth =
              wrap_angle(pose.azimuth + normal(rng, spec.azimuth_jitter * jitter_scale));
          obj.params.scale = 1.0;
          obj.params.deform.resize(model.modes());
          for (int k = 0; k < model.modes(); ++k) {
            obj.params.deform(k) =
                normal(rng, std::sqrt(model.eigenvalues()(k)) * spec.deform_shrink);
          }
          obj.box = object_box(model, obj.params);
          obj.model_id = model.members().empty() ? std::string()
                                                 : model.nearest_model(obj.params.deform);
          scene.objects.push_back(std::move(obj));
        }
        try {
          placed = validate_scene(scene, model, camera);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kBehindCamera) throw;
        }
      }
      jitter_scale *= 0.5;
    }
    if (!placed) {
      fail(ErrorCode::kInvalidArgument, "arrangement cannot be placed inside the camera view");
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

EvalScene to_eval_scene(const Scene& scene) {
  EvalScene out;
  for (const auto& o : scene.objects) out.objects.push_back({o.box, o.params.azimuth, 1});
  out.occluders = scene.occluders;
  return out;
}

EvalScene to_eval_scene(const InferredScene& scene) {
  EvalScene out;
  for (const auto& o : scene.objects) out.objects.push_back({o.box, o.params.azimuth, 1});
  return out;
}

std::vector<std::vector<Vec2>> project_scene(const Scene& scene, const TemplateModel& model,
                                             const Camera& camera) {
  std::vector<std::vector<Vec2>> out;
  for (const auto& o : scene.objects) {
    const Eigen::MatrixX3d world = place_keypoints(model.instantiate(o.params.deform), o.params);
    std::vector<Vec2> pts;
    for (Eigen::Index i = 0; i < world.rows(); ++i) {
      pts.push_back(camera.project(world.row(i).transpose()));
    }
    out.push_back(std::move(pts));
  }
  return out;
}

KeypointMapStack render_scene(const Scene& scene, const TemplateModel& model,
                              const Camera& camera, double sigma,
                              const Degradation& degradation, std::uint64_t seed) {
  require(degradation.drop_min >= 0.0 && degradation.drop_min <= degradation.drop_max &&
              degradation.drop_max <= 1.0,
          "drop fractions must satisfy 0 <= min <= max <= 1");
  const auto projected = project_scene(scene, model, camera);
  std::mt19937_64 rng(seed);
  const double drop = degradation.drop_max > degradation.drop_min
                          ? uniform(rng, degradation.drop_min, degradation.drop_max)
                          : degradation.drop_min;
  std::vector<std::vector<std::optional<Vec2>>> kept;
  if (degradation.mode == OcclusionMode::kAll || projected.empty()) {
    kept = occlude(projected, drop, rng());
  } else {
    const int victim =
        std::uniform_int_distribution<int>(0, static_cast<int>(projected.size()) - 1)(rng);
    kept = occlude(projected, 0.0, 0);
    kept[victim] = occlude({projected[victim]}, drop, rng())[0];
  }
  return render_maps(group_by_type(kept, model.keypoint_count()), sigma,
                     camera.map_size().width, camera.map_size().height);
}

const char* condition_name(Condition condition) {
  switch (condition) {
    case Condition::kFull: return "full";
    case Condition::kNoPairwise: return "no_pairwise";
    case Condition::kSingleIteration: return "single_iteration";
  }
  return "full";
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  const double drops[] = {0.0, 0.25, 0.5, 0.75};
  for (double d : drops) {
    char name[32];
    std::snprintf(name, sizeof(name), "drop_%.2f", d);
    c.bins.push_back({name, {d, d, OcclusionMode::kAll}, 10});
  }
  return c;
}

void ExperimentConfig::validate() const {
  auto unit_open = [](double v) { return v > 0.0 && v < 1.0; };
  require(unit_open(hyper.tau_m) && unit_open(hyper.tau_u) && unit_open(hyper.alpha) &&
              unit_open(hyper.beta),
          "hyperparameters must lie in (0, 1)");
  require(max_iterations >= 1, "max_iterations must be at least 1");
  require(database_size >= 2, "database_size must be at least 2");
  require(training_scenes >= 1, "training_scenes must be at least 1");
  require(gmm_components >= 1, "gmm_components must be at least 1");
  require(delta_r > 0.0, "delta_r must be positive");
  require(!bins.empty(), "at least one occlusion bin is required");
  for (const auto& b : bins) {
    require(b.scenes >= 1, "every bin needs at least one scene");
    require(b.degradation.drop_min >= 0.0 && b.degradation.drop_min <= b.degradation.drop_max &&
                b.degradation.drop_max <= 1.0,
            "drop fractions must lie in [0, 1]");
  }
  require(!conditions.empty(), "at least one condition is required");
  require(unit_open(tau_j) && tau_theta > 0.0, "evaluation thresholds out of range");
  require(occlusion_grid >= 8, "occlusion_grid must be at least 8");
  require(arrangement.min_count >= 1 && arrangement.min_count <= arrangement.max_count,
          "object count range must be non-empty");
  require(arrangement.spacing > 0.0, "spacing must be positive");
}

Stat summarize(const std::vector<double>& values) {
  Stat s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / values.size();
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / values.size());
  return s;
}

const Stat& ConditionReport::measure(const std::string& key) const {
  for (const auto& [k, v] : measures) {
    if (k == key) return v;
  }
  fail(ErrorCode::kInvalidArgument, "unknown measure: " + key);
}

ExperimentAssets build_assets(const ExperimentConfig& config) {
  config.validate();
  ExperimentAssets assets;
  const auto database = generate_chair_database(config.database_size, derive(config.seed, 1));
  assets.model = TemplateModel::build(database);
  const bool pairwise = std::any_of(config.conditions.begin(), config.conditions.end(),
                                    [](Condition c) { return c != Condition::kNoPairwise; });
  if (pairwise) {
    ArrangementSpec training = config.arrangement;
    training.seed = derive(config.seed, 2);
    const auto scenes =
        generate_scenes(training, config.training_scenes, assets.model, assets.camera);
    std::vector<std::vector<ObjectPose>> poses;
    for (const auto& s : scenes) {
      std::vector<ObjectPose> p;
      for (const auto& o : s.objects) p.push_back(o.params.pose());
      poses.push_back(std::move(p));
    }
    const auto samples = extract_pairs(poses, config.delta_r);
    GmmFitOptions options;
    options.delta_r = config.delta_r;
    assets.gmm = fit_gmm(samples, config.gmm_components, derive(config.seed, 3), options);
  }
  return assets;
}

InferenceOptions inference_options(const HyperParams& hyper, Condition condition,
                                   int max_iterations) {
  InferenceOptions o;
  o.tau_m = hyper.tau_m;
  o.tau_u = hyper.tau_u;
  o.alpha = hyper.alpha;
  o.beta = hyper.beta;
  o.max_iterations = condition == Condition::kSingleIteration ? 1 : max_iterations;
  o.use_pairwise = condition != Condition::kNoPairwise;
  return o;
}

SceneOutcome evaluate_scene(const Scene& gt, const InferredScene& result, const Camera& camera,
                            double tau_j, double tau_theta) {
  SceneOutcome out;
  const EvalScene g = to_eval_scene(gt);
  const EvalScene r = to_eval_scene(result);
  out.report = evaluate(r, g, camera, tau_j, tau_theta);
  out.found = static_cast<int>(result.objects.size());
  for (std::size_t i = 0; i < gt.objects.size(); ++i) {
    const Correspondence c = max_iou_correspondence(g.objects[i], r, IouSpace::k3d);
    if (c.index < 0 || !(c.iou > tau_j)) continue;
    const auto& found = result.objects[c.index].params;
    out.position_errors.push_back((found.translation - gt.objects[i].params.translation).norm());
    out.azimuth_errors.push_back(
        angle_difference_degrees(found.azimuth, gt.objects[i].params.azimuth));
  }
  return out;
}

namespace {

struct ConditionAccumulator {
  std::vector<std::vector<double>> measures = std::vector<std::vector<double>>(12);
  std::vector<double> angdiff, position, azimuth, found;
  std::vector<std::vector<double>> sweep_p, sweep_r, sweep_f;
};

const char* kMeasureKeys[] = {"iou3d", "iou2d", "loc", "locang"};

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, build_assets(config));
}

ExperimentReport run_experiment(const ExperimentConfig& config, const ExperimentAssets& assets) {
  config.validate();
  const double sigma =
      config.sigma > 0.0 ? config.sigma : default_sigma(assets.camera.map_size().width);
  const auto tau_js = default_tau_j_grid();
  const auto tau_thetas = default_tau_theta_grid();

  ExperimentReport report;
  report.template_modes = assets.model.modes();
  report.gmm_components = assets.gmm ? assets.gmm->size() : 0;
  for (std::size_t b = 0; b < config.bins.size(); ++b) {
    const OcclusionBin& bin = config.bins[b];
    ArrangementSpec spec = config.arrangement;
    spec.seed = derive(config.seed, 100 + b);
    const auto scenes = generate_scenes(spec, bin.scenes, assets.model, assets.camera);

    BinReport br;
    br.name = bin.name;
    br.degradation = bin.degradation;
    br.scenes = bin.scenes;
    std::vector<double> gt_counts, occlusion;
    std::vector<int> histogram;
    std::vector<ConditionAccumulator> acc(config.conditions.size());

    for (std::size_t s = 0; s < scenes.size(); ++s) {
      const Scene& scene = scenes[s];
      gt_counts.push_back(static_cast<double>(scene.objects.size()));
      const OcclusionReport occ =
          occlusion_score(to_eval_scene(scene), assets.camera, config.occlusion_grid);
      occlusion.insert(occlusion.end(), occ.per_object.begin(), occ.per_object.end());
      if (histogram.empty()) histogram.assign(occ.histogram.size(), 0);
      for (std::size_t h = 0; h < occ.histogram.size(); ++h) histogram[h] += occ.histogram[h];

      const KeypointMapStack maps = render_scene(scene, assets.model, assets.camera, sigma,
                                                 bin.degradation, derive(config.seed, 200 + b, s));
      for (std::size_t c = 0; c < config.conditions.size(); ++c) {
        const Condition cond = config.conditions[c];
        const InferenceOptions options =
            inference_options(config.hyper, cond, config.max_iterations);
        const PairwiseGmm* gmm =
            options.use_pairwise && assets.gmm ? &*assets.gmm : nullptr;
        const InferredScene result =
            infer_scene(maps, assets.camera, assets.model, gmm, options);
        const SceneOutcome outcome =
            evaluate_scene(scene, result, assets.camera, config.tau_j, config.tau_theta);
        auto& a = acc[c];
        const PrecisionRecall* prs[] = {&outcome.report.iou3d, &outcome.report.iou2d,
                                        &outcome.report.loc, &outcome.report.locang};
        for (int m = 0; m < 4; ++m) {
          a.measures[3 * m].push_back(prs[m]->precision);
          a.measures[3 * m + 1].push_back(prs[m]->recall);
          a.measures[3 * m + 2].push_back(prs[m]->f1);
        }
        if (outcome.report.angdiff_degrees) a.angdiff.push_back(*outcome.report.angdiff_degrees);
        a.position.insert(a.position.end(), outcome.position_errors.begin(),
                          outcome.position_errors.end());
        a.azimuth.insert(a.azimuth.end(), outcome.azimuth_errors.begin(),
                         outcome.azimuth_errors.end());
        a.found.push_back(outcome.found);
        if (config.sweep) {
          const auto points =
              threshold_sweep(to_eval_scene(result), to_eval_scene(scene), tau_js, tau_thetas);
          if (a.sweep_f.empty()) {
            a.sweep_p.resize(points.size());
            a.sweep_r.resize(points.size());
            a.sweep_f.resize(points.size());
          }
          for (std::size_t p = 0; p < points.size(); ++p) {
            a.sweep_p[p].push_back(points[p].locang.precision);
            a.sweep_r[p].push_back(points[p].locang.recall);
            a.sweep_f[p].push_back(points[p].locang.f1);
          }
        }
      }
    }

    br.gt_objects = summarize(gt_counts);
    br.occlusion = summarize(occlusion);
    br.occlusion_histogram = histogram;
    for (std::size_t c = 0; c < config.conditions.size(); ++c) {
      const auto& a = acc[c];
      ConditionReport cr;
      cr.condition = config.conditions[c];
      const char* parts[] = {"precision", "recall", "f1"};
      for (int m = 0; m < 4; ++m) {
        for (int p = 0; p < 3; ++p) {
          cr.measures.emplace_back(std::string(kMeasureKeys[m]) + "." + parts[p],
                                   summarize(a.measures[3 * m + p]));
        }
      }
      cr.angdiff_degrees = summarize(a.angdiff);
      cr.position_error = summarize(a.position);
      cr.azimuth_error = summarize(a.azimuth);
      cr.objects_found = summarize(a.found);
      if (config.sweep) {
        std::size_t p = 0;
        for (double tj : tau_js) {
          for (double tt : tau_thetas) {
            cr.sweep.push_back({tj, tt,
                                {summarize(a.sweep_p[p]).mean, summarize(a.sweep_r[p]).mean,
                                 summarize(a.sweep_f[p]).mean}});
            ++p;
          }
        }
      }
      br.conditions.push_back(std::move(cr));
    }
    report.bins.push_back(std::move(br));
  }
  return report;
}

TuneResult random_search(const std::function<double(const HyperParams&)>& objective,
                         int budget, std::uint64_t seed, const TuneSpace& space) {
  require(budget >= 1, "tuning budget must be at least 1");
  for (const TuneRange* r : {&space.tau_m, &space.tau_u, &space.alpha, &space.beta}) {
    require(r->lo > 0.0 && r->lo <= r->hi && r->hi <= 1.0, "tuning ranges must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  auto draw = [&](const TuneRange& r) { return r.lo < r.hi ? uniform(rng, r.lo, r.hi) : r.lo; };
  TuneResult out;
  for (int t = 0; t < budget; ++t) {
    TuneTrial trial;
    trial.hyper.tau_m = draw(space.tau_m);
    trial.hyper.tau_u = draw(space.tau_u);
    trial.hyper.alpha = draw(space.alpha);
    trial.hyper.beta = draw(space.beta);
    trial.objective = objective(trial.hyper);
    if (t == 0 || trial.objective > out.best_objective) {
      out.best = trial.hyper;
      out.best_objective = trial.objective;
    }
    out.trials.push_back(trial);
  }
  return out;
}

TuneResult tune(const ExperimentConfig& config, int budget, std::uint64_t seed, int held_out,
                const TuneSpace& space) {
  require(held_out >= 1, "held-out set must contain at least one scene");
  const ExperimentAssets assets = build_assets(config);
  const double sigma =
      config.sigma > 0.0 ? config.sigma : default_sigma(assets.camera.map_size().width);
  ArrangementSpec spec = config.arrangement;
  spec.seed = derive(seed, 300);
  const auto scenes = generate_scenes(spec, held_out, assets.model, assets.camera);
  std::vector<KeypointMapStack> maps;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    maps.push_back(render_scene(scenes[s], assets.model, assets.camera, sigma,
                                config.bins.front().degradation, derive(seed, 301, s)));
  }
  const PairwiseGmm* gmm = assets.gmm ? &*assets.gmm : nullptr;
  auto objective = [&](const HyperParams& hyper) {
    std::vector<double> f1;
    const InferenceOptions options =
        inference_options(hyper, gmm ? Condition::kFull : Condition::kNoPairwise,
                          config.max_iterations);
    for (std::size_t s = 0; s < scenes.size(); ++s) {
      const InferredScene result = infer_scene(maps[s], assets.camera, assets.model, gmm, options);
      f1.push_back(evaluate_scene(scenes[s], result, assets.camera, config.tau_j,
                                  config.tau_theta)
                       .report.locang.f1);
    }
    return summarize(f1).mean;
  };
  return random_search(objective, budget, seed, space);
}

}  // namespace scenemock
