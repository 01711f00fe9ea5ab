// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#include "scenemock/scenemock.h"

#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "scenemock/error.hpp"
#include "scenemock/harness.hpp"
#include "scenemock/keypoint_maps.hpp"
#include "scenemock/scene_io.hpp"
#include "scenemock/selection.hpp"

struct sm_camera {
  scenemock::Camera value;
};
struct sm_template {
  scenemock::TemplateModel value;
};
struct sm_maps {
  scenemock::KeypointMapStack value;
};
struct sm_gmm {
  scenemock::PairwiseGmm value;
};

namespace {

using scenemock::ErrorCode;
using scenemock::Json;

thread_local std::string g_last_error;

sm_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return SM_INVALID_ARGUMENT;
    case ErrorCode::kIo: return SM_IO;
    case ErrorCode::kFormat: return SM_FORMAT;
    case ErrorCode::kNumeric: return SM_NUMERIC;
    case ErrorCode::kBehindCamera: return SM_BEHIND_CAMERA;
    case ErrorCode::kDegenerateDatabase: return SM_DEGENERATE_DATABASE;
    case ErrorCode::kInsufficientSamples: return SM_INSUFFICIENT_SAMPLES;
    case ErrorCode::kCollapsedComponent: return SM_COLLAPSED_COMPONENT;
    case ErrorCode::kZeroSupport: return SM_ZERO_SUPPORT;
  }
  return SM_INTERNAL;
}

template <typename F>
sm_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return SM_OK;
  } catch (const scenemock::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SM_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SM_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SM_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) scenemock::fail(ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  if (out != nullptr) *out = dup_string(s);
}

Json parse(const char* text, const char* what) {
  need(text, what);
  return scenemock::parse_json(text);
}

scenemock::InferenceOptions inference_options_from_json(const char* text) {
  scenemock::InferenceOptions o;
  if (text == nullptr) return o;
  const Json j = scenemock::parse_json(text);
  try {
    if (!j.is_object()) scenemock::fail(ErrorCode::kFormat, "options must be a JSON object");
    o.tau_m = j.value("tau_m", o.tau_m);
    o.tau_u = j.value("tau_u", o.tau_u);
    o.alpha = j.value("alpha", o.alpha);
    o.beta = j.value("beta", o.beta);
    o.max_iterations = j.value("max_iterations", o.max_iterations);
    o.use_pairwise = j.value("use_pairwise", o.use_pairwise);
    o.max_deform_sigma = j.value("max_deform_sigma", o.max_deform_sigma);
  } catch (const nlohmann::json::exception& e) {
    scenemock::fail(ErrorCode::kFormat, std::string("malformed options: ") + e.what());
  }
  return o;
}

}  // namespace

extern "C" {

const char* sm_version(void) { return "0.1.0"; }

const char* sm_status_name(sm_status status) {
  switch (status) {
    case SM_OK: return "ok";
    case SM_INVALID_ARGUMENT: return "invalid_argument";
    case SM_IO: return "io";
    case SM_FORMAT: return "format";
    case SM_NUMERIC: return "numeric";
    case SM_BEHIND_CAMERA: return "behind_camera";
    case SM_DEGENERATE_DATABASE: return "degenerate_database";
    case SM_INSUFFICIENT_SAMPLES: return "insufficient_samples";
    case SM_COLLAPSED_COMPONENT: return "collapsed_component";
    case SM_ZERO_SUPPORT: return "zero_support";
    case SM_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* sm_last_error_message(void) { return g_last_error.c_str(); }

void sm_string_free(char* str) { delete[] str; }

sm_status sm_camera_default(sm_camera** out) {
  return guard([&] {
    need(out, "out");
    *out = new sm_camera{scenemock::Camera::harness_default()};
  });
}

sm_status sm_camera_from_json(const char* json, sm_camera** out) {
  return guard([&] {
    need(out, "out");
    *out = new sm_camera{scenemock::camera_from_json(parse(json, "json"))};
  });
}

sm_status sm_camera_to_json(const sm_camera* camera, char** out_json) {
  return guard([&] {
    need(camera, "camera");
    need(out_json, "out_json");
    put(out_json, scenemock::to_json(camera->value).dump(2));
  });
}

void sm_camera_free(sm_camera* camera) { delete camera; }

sm_status sm_template_generate(int count, uint64_t seed, double variance_target,
                               sm_template** out) {
  return guard([&] {
    need(out, "out");
    scenemock::require(variance_target > 0.0 && variance_target <= 1.0,
                       "variance target must lie in (0, 1]");
    const auto db = scenemock::generate_chair_database(count, seed);
    *out = new sm_template{scenemock::TemplateModel::build(db, variance_target)};
  });
}

sm_status sm_template_from_json(const char* json, sm_template** out) {
  return guard([&] {
    need(out, "out");
    *out = new sm_template{scenemock::template_from_json(parse(json, "json"))};
  });
}

sm_status sm_template_to_json(const sm_template* model, char** out_json) {
  return guard([&] {
    need(model, "template");
    need(out_json, "out_json");
    put(out_json, scenemock::to_json(model->value).dump(2));
  });
}

sm_status sm_template_info(const sm_template* model, int* keypoints, int* modes) {
  return guard([&] {
    need(model, "template");
    if (keypoints != nullptr) *keypoints = model->value.keypoint_count();
    if (modes != nullptr) *modes = model->value.modes();
  });
}

void sm_template_free(sm_template* model) { delete model; }

sm_status sm_maps_load(const char* path, sm_maps** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new sm_maps{scenemock::load_kpm(path)};
  });
}

sm_status sm_maps_save(const sm_maps* maps, const char* path) {
  return guard([&] {
    need(maps, "maps");
    need(path, "path");
    scenemock::save_kpm(path, maps->value);
  });
}

sm_status sm_maps_info(const sm_maps* maps, int* channels, int* width, int* height,
                       float* sigma) {
  return guard([&] {
    need(maps, "maps");
    if (channels != nullptr) *channels = maps->value.channels();
    if (width != nullptr) *width = maps->value.width();
    if (height != nullptr) *height = maps->value.height();
    if (sigma != nullptr) *sigma = maps->value.sigma();
  });
}

sm_status sm_maps_count_peaks(const sm_maps* maps, double tau_m, int* counts, int capacity) {
  return guard([&] {
    need(maps, "maps");
    need(counts, "counts");
    scenemock::require(tau_m > 0.0 && tau_m < 1.0, "tau_m must lie in (0, 1)");
    const auto loc = scenemock::extract_locations(maps->value, tau_m);
    for (int c = 0; c < capacity && c < static_cast<int>(loc.types.size()); ++c) {
      counts[c] = static_cast<int>(loc.types[c].size());
    }
  });
}

sm_status sm_maps_render(const char* scenes_json, int index, const sm_template* model,
                         const sm_camera* camera, double sigma, double drop_min,
                         double drop_max, int mode_one, uint64_t seed, sm_maps** out) {
  return guard([&] {
    need(model, "template");
    need(camera, "camera");
    need(out, "out");
    const Json doc = parse(scenes_json, "scenes_json");
    scenemock::Scene scene;
    if (doc.contains("scenes")) {
      const auto scenes = scenemock::scenes_from_json(doc);
      scenemock::require(index >= 0 && index < static_cast<int>(scenes.size()),
                         "scene index out of range");
      scene = scenes[index];
    } else {
      scene = scenemock::scene_from_json(doc);
    }
    const double s = sigma > 0.0 ? sigma : scenemock::default_sigma(camera->value.map_size().width);
    scenemock::Degradation d{drop_min, drop_max,
                             mode_one ? scenemock::OcclusionMode::kOne
                                      : scenemock::OcclusionMode::kAll};
    *out = new sm_maps{scenemock::render_scene(scene, model->value, camera->value, s, d, seed)};
  });
}

void sm_maps_free(sm_maps* maps) { delete maps; }

sm_status sm_scenes_generate(const char* arrangement_json, int count, const sm_template* model,
                             const sm_camera* camera, char** out_json) {
  return guard([&] {
    need(model, "template");
    need(camera, "camera");
    need(out_json, "out_json");
    scenemock::ArrangementSpec spec;
    if (arrangement_json != nullptr) {
      spec = scenemock::arrangement_from_json(scenemock::parse_json(arrangement_json));
    }
    const auto scenes = scenemock::generate_scenes(spec, count, model->value, camera->value);
    put(out_json, scenemock::scenes_to_json(scenes, camera->value).dump(2));
  });
}

sm_status sm_gmm_fit(const char* scenes_json, int components, double delta_r, uint64_t seed,
                     sm_gmm** out) {
  return guard([&] {
    need(out, "out");
    scenemock::require(delta_r > 0.0, "delta_r must be positive");
    const auto scenes = scenemock::scenes_from_json(parse(scenes_json, "scenes_json"));
    std::vector<std::vector<scenemock::ObjectPose>> poses;
    for (const auto& s : scenes) {
      std::vector<scenemock::ObjectPose> p;
      for (const auto& o : s.objects) p.push_back(o.params.pose());
      poses.push_back(std::move(p));
    }
    const auto samples = scenemock::extract_pairs(poses, delta_r);
    scenemock::GmmFitOptions options;
    options.delta_r = delta_r;
    *out = new sm_gmm{scenemock::fit_gmm(samples, components, seed, options)};
  });
}

sm_status sm_gmm_from_json(const char* json, sm_gmm** out) {
  return guard([&] {
    need(out, "out");
    *out = new sm_gmm{scenemock::gmm_from_json(parse(json, "json"))};
  });
}

sm_status sm_gmm_to_json(const sm_gmm* gmm, char** out_json) {
  return guard([&] {
    need(gmm, "gmm");
    need(out_json, "out_json");
    put(out_json, scenemock::to_json(gmm->value).dump(2));
  });
}

void sm_gmm_free(sm_gmm* gmm) { delete gmm; }

uint64_t sm_gmm_evaluation_count(void) { return scenemock::gmm_evaluation_count(); }

void sm_reset_gmm_evaluation_count(void) { scenemock::reset_gmm_evaluation_count(); }

sm_status sm_infer(const sm_maps* maps, const sm_camera* camera, const sm_template* model,
                   const sm_gmm* gmm, const char* options_json, char** out_scene_json) {
  return guard([&] {
    need(maps, "maps");
    need(camera, "camera");
    need(model, "template");
    need(out_scene_json, "out_scene_json");
    const auto options = inference_options_from_json(options_json);
    const auto result = scenemock::infer_scene(maps->value, camera->value, model->value,
                                               gmm != nullptr ? &gmm->value : nullptr, options);
    put(out_scene_json, scenemock::to_json(result, camera->value).dump(2));
  });
}

sm_status sm_evaluate(const char* result_json, const char* gt_json, int gt_index,
                      const sm_camera* camera, double tau_j, double tau_theta,
                      char** out_report_json) {
  return guard([&] {
    need(out_report_json, "out_report_json");
    scenemock::require(tau_j > 0.0 && tau_j < 1.0 && tau_theta > 0.0,
                       "evaluation thresholds out of range");
    const auto result = scenemock::eval_scene_from_json(parse(result_json, "result_json"));
    const auto gt = scenemock::eval_scene_from_json(parse(gt_json, "gt_json"), gt_index);
    const scenemock::Camera cam =
        camera != nullptr ? camera->value : scenemock::Camera::harness_default();
    const auto report = scenemock::evaluate(result, gt, cam, tau_j, tau_theta);
    put(out_report_json, scenemock::to_json(report).dump(2));
  });
}

sm_status sm_sweep(const char* result_json, const char* gt_json, int gt_index, char** out_csv) {
  return guard([&] {
    need(out_csv, "out_csv");
    const auto result = scenemock::eval_scene_from_json(parse(result_json, "result_json"));
    const auto gt = scenemock::eval_scene_from_json(parse(gt_json, "gt_json"), gt_index);
    const auto points = scenemock::threshold_sweep(result, gt, scenemock::default_tau_j_grid(),
                                                   scenemock::default_tau_theta_grid());
    put(out_csv, scenemock::sweep_csv(points));
  });
}

sm_status sm_experiment(const char* config_json, char** out_report_json, char** out_csv,
                        char** out_sweep_csv) {
  return guard([&] {
    const scenemock::ExperimentConfig config =
        config_json != nullptr ? scenemock::config_from_json(scenemock::parse_json(config_json))
                               : scenemock::ExperimentConfig::defaults();
    const auto report = scenemock::run_experiment(config);
    // Build every output before handing any to the caller.
    const std::string j = scenemock::to_json(report, config).dump(2);
    const std::string c = scenemock::experiment_csv(report);
    const std::string s = scenemock::experiment_sweep_csv(report);
    put(out_report_json, j);
    put(out_csv, c);
    put(out_sweep_csv, s);
  });
}

sm_status sm_tune(const char* config_json, int budget, uint64_t seed, int held_out,
                  char** out_json) {
  return guard([&] {
    need(out_json, "out_json");
    const scenemock::ExperimentConfig config =
        config_json != nullptr ? scenemock::config_from_json(scenemock::parse_json(config_json))
                               : scenemock::ExperimentConfig::defaults();
    const auto result = scenemock::tune(config, budget, seed, held_out);
    put(out_json, scenemock::to_json(result).dump(2));
  });
}

}  // extern "C"
