// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end over the scenemock C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scenemock/scenemock.h"

namespace {

using Json = nlohmann::ordered_json;

// Exit codes: 0 success, 2 validation failure, 1 internal error.
struct Failure {
  int exit_code;
  std::string message;
};

int exit_code_for(sm_status s) {
  return s == SM_INTERNAL || s == SM_NUMERIC || s == SM_COLLAPSED_COMPONENT ? 1 : 2;
}

void check(sm_status s) {
  if (s != SM_OK) {
    throw Failure{exit_code_for(s),
                  std::string(sm_status_name(s)) + ": " + sm_last_error_message()};
  }
}

[[noreturn]] void invalid(const std::string& message) { throw Failure{2, message}; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) invalid("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) invalid("cannot write " + out);
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

// Owning wrapper for strings returned by the library.
std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  sm_string_free(s);
  return out;
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using CameraHandle = Handle<sm_camera, sm_camera_free>;
using TemplateHandle = Handle<sm_template, sm_template_free>;
using MapsHandle = Handle<sm_maps, sm_maps_free>;
using GmmHandle = Handle<sm_gmm, sm_gmm_free>;

void load_camera(const std::string& path, CameraHandle& cam) {
  if (path.empty()) {
    check(sm_camera_default(cam.out()));
  } else {
    const std::string text = read_file(path);
    // Accept a bare camera or any document with a "camera" member.
    Json doc;
    try {
      doc = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      invalid(std::string("malformed camera file: ") + e.what());
    }
    const Json& c = doc.is_object() && doc.contains("camera") ? doc.at("camera") : doc;
    check(sm_camera_from_json(c.dump().c_str(), cam.out()));
  }
}

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  try {
    Json j = Json::parse(read_file(path));
    if (!j.is_object()) invalid("config must be a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed config: ") + e.what());
  }
}

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string config;
};

std::uint64_t seed_or(const Globals& g, std::uint64_t fallback) { return g.seed.value_or(fallback); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scenemock: recover chair arrangements from keypoint maps"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Random seed");
  app.add_option("--out", g.out, "Output file (stdout if omitted for text outputs)");
  app.add_option("--config", g.config, "JSON config file");
  app.set_version_flag("--version", std::string(sm_version()));

  // gen-templates
  auto* gen_t = app.add_subcommand("gen-templates", "Build a PCA template from procedural chairs");
  int t_count = 40;
  double t_variance = 0.85;
  gen_t->add_option("--count", t_count, "Number of database models")->check(CLI::PositiveNumber);
  gen_t->add_option("--variance", t_variance, "Explained variance target");

  // gen-scenes
  auto* gen_s = app.add_subcommand("gen-scenes", "Generate ground-truth scenes");
  std::string s_template, s_camera, s_layout;
  int s_count = 10, s_min = -1, s_max = -1;
  double s_spacing = -1.0;
  gen_s->add_option("--template", s_template, "Template JSON")->required();
  gen_s->add_option("--camera", s_camera, "Camera JSON");
  gen_s->add_option("--count", s_count, "Number of scenes")->check(CLI::PositiveNumber);
  gen_s->add_option("--layout", s_layout, "row, facing_pairs, ring_around_table, random_scatter or mixed");
  gen_s->add_option("--min-objects", s_min, "Minimum objects per scene");
  gen_s->add_option("--max-objects", s_max, "Maximum objects per scene");
  gen_s->add_option("--spacing", s_spacing, "Spacing between neighbours in meters");

  // render-maps
  auto* render = app.add_subcommand("render-maps", "Render keypoint maps of one scene");
  std::string r_scenes, r_template, r_camera, r_mode = "all";
  int r_index = 0;
  double r_sigma = 0.0, r_drop_min = 0.0, r_drop_max = -1.0;
  render->add_option("--scenes", r_scenes, "Scenes JSON")->required();
  render->add_option("--index", r_index, "Scene index");
  render->add_option("--template", r_template, "Template JSON")->required();
  render->add_option("--camera", r_camera, "Camera JSON (defaults to the scenes file camera)");
  render->add_option("--sigma", r_sigma, "Lobe width in map cells (<= 0: default)");
  render->add_option("--drop", r_drop_min, "Keypoint drop fraction (or range start)");
  render->add_option("--drop-max", r_drop_max, "Drop fraction range end");
  render->add_option("--mode", r_mode, "Occlusion mode: all or one")
      ->check(CLI::IsMember({"all", "one"}));

  // fit-gmm
  auto* fit = app.add_subcommand("fit-gmm", "Fit the pairwise co-occurrence mixture");
  std::string f_scenes;
  int f_components = 5;
  double f_delta_r = 1.5;
  fit->add_option("--scenes", f_scenes, "Scenes JSON")->required();
  fit->add_option("--components", f_components, "Mixture components")->check(CLI::PositiveNumber);
  fit->add_option("--delta-r", f_delta_r, "Pair radius in meters");

  // infer
  auto* infer = app.add_subcommand("infer", "Recover a scene from keypoint maps");
  std::string i_maps, i_camera, i_template, i_gmm;
  bool i_no_pairwise = false, i_single = false;
  std::optional<double> i_tau_m, i_tau_u, i_alpha, i_beta;
  std::optional<int> i_iterations;
  infer->add_option("--maps", i_maps, "Keypoint maps (.kpm)")->required();
  infer->add_option("--camera", i_camera, "Camera JSON");
  infer->add_option("--template", i_template, "Template JSON")->required();
  infer->add_option("--gmm", i_gmm, "Mixture JSON");
  infer->add_flag("--no-pairwise", i_no_pairwise, "Disable all pairwise terms");
  infer->add_flag("--single-iteration", i_single, "Stop after the first selection");
  infer->add_option("--tau-m", i_tau_m, "Keypoint threshold");
  infer->add_option("--tau-u", i_tau_u, "Fit acceptance threshold");
  infer->add_option("--alpha", i_alpha, "Unary exponent");
  infer->add_option("--beta", i_beta, "Pairwise exponent");
  infer->add_option("--max-iterations", i_iterations, "Iteration limit");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score a result scene against ground truth");
  std::string e_result, e_gt, e_camera;
  int e_gt_index = 0;
  double e_tau_j = 0.25, e_tau_theta = 15.0;
  bool e_sweep = false;
  eval->add_option("--result", e_result, "Result scene JSON")->required();
  eval->add_option("--gt", e_gt, "Ground-truth scene or scenes JSON")->required();
  eval->add_option("--gt-index", e_gt_index, "Index into a scenes file");
  eval->add_option("--camera", e_camera, "Camera JSON for 2D IoU");
  eval->add_option("--tau-j", e_tau_j, "IoU threshold");
  eval->add_option("--tau-theta", e_tau_theta, "Angle threshold in degrees");
  eval->add_flag("--sweep", e_sweep, "Emit the LocAng threshold grid as CSV");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run the occlusion-binned ablation experiment");
  std::string x_csv, x_sweep_csv;
  exp->add_option("--csv", x_csv, "Write the summary CSV here");
  exp->add_option("--sweep-csv", x_sweep_csv, "Write the threshold sweep CSV here");

  // tune
  auto* tune = app.add_subcommand("tune", "Random search over tau_m, tau_u, alpha, beta");
  int u_budget = 20, u_held_out = 10;
  tune->add_option("--budget", u_budget, "Number of trials")->check(CLI::PositiveNumber);
  tune->add_option("--held-out", u_held_out, "Held-out scenes")->check(CLI::PositiveNumber);

  // kpm-info
  auto* info = app.add_subcommand("kpm-info", "Describe a keypoint map file");
  std::string k_maps;
  double k_tau_m = 0.25;
  info->add_option("--maps", k_maps, "Keypoint maps (.kpm)")->required();
  info->add_option("--tau-m", k_tau_m, "Peak threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    const Json config = load_config(g.config);

    if (gen_t->parsed()) {
      TemplateHandle tpl;
      check(sm_template_generate(t_count, seed_or(g, 1), t_variance, tpl.out()));
      char* s = nullptr;
      check(sm_template_to_json(tpl.get(), &s));
      emit(g.out, take(s));
    } else if (gen_s->parsed()) {
      TemplateHandle tpl;
      check(sm_template_from_json(read_file(s_template).c_str(), tpl.out()));
      CameraHandle cam;
      load_camera(s_camera, cam);
      Json arrangement = config.contains("arrangement") ? config.at("arrangement") : Json::object();
      if (!s_layout.empty()) arrangement["layout"] = s_layout;
      if (s_min > 0) arrangement["min_count"] = s_min;
      if (s_max > 0) arrangement["max_count"] = s_max;
      if (s_spacing > 0) arrangement["spacing"] = s_spacing;
      if (g.seed) arrangement["seed"] = *g.seed;
      char* s = nullptr;
      check(sm_scenes_generate(arrangement.dump().c_str(), s_count, tpl.get(), cam.get(), &s));
      emit(g.out, take(s));
    } else if (render->parsed()) {
      if (g.out.empty()) invalid("render-maps needs --out");
      const std::string scenes = read_file(r_scenes);
      TemplateHandle tpl;
      check(sm_template_from_json(read_file(r_template).c_str(), tpl.out()));
      CameraHandle cam;
      load_camera(r_camera.empty() ? r_scenes : r_camera, cam);
      MapsHandle maps;
      const double drop_max = r_drop_max < 0.0 ? r_drop_min : r_drop_max;
      check(sm_maps_render(scenes.c_str(), r_index, tpl.get(), cam.get(), r_sigma, r_drop_min,
                           drop_max, r_mode == "one", seed_or(g, 1), maps.out()));
      check(sm_maps_save(maps.get(), g.out.c_str()));
    } else if (fit->parsed()) {
      GmmHandle gmm;
      check(sm_gmm_fit(read_file(f_scenes).c_str(), f_components, f_delta_r, seed_or(g, 1),
                       gmm.out()));
      char* s = nullptr;
      check(sm_gmm_to_json(gmm.get(), &s));
      emit(g.out, take(s));
    } else if (infer->parsed()) {
      MapsHandle maps;
      check(sm_maps_load(i_maps.c_str(), maps.out()));
      CameraHandle cam;
      load_camera(i_camera, cam);
      TemplateHandle tpl;
      check(sm_template_from_json(read_file(i_template).c_str(), tpl.out()));
      GmmHandle gmm;
      Json options = config.contains("hyper") ? config.at("hyper") : Json::object();
      if (config.contains("max_iterations")) options["max_iterations"] = config.at("max_iterations");
      if (i_tau_m) options["tau_m"] = *i_tau_m;
      if (i_tau_u) options["tau_u"] = *i_tau_u;
      if (i_alpha) options["alpha"] = *i_alpha;
      if (i_beta) options["beta"] = *i_beta;
      if (i_iterations) options["max_iterations"] = *i_iterations;
      if (i_single) options["max_iterations"] = 1;
      if (i_no_pairwise) {
        options["use_pairwise"] = false;
      } else {
        if (i_gmm.empty()) invalid("infer needs --gmm unless --no-pairwise is given");
        check(sm_gmm_from_json(read_file(i_gmm).c_str(), gmm.out()));
      }
      char* s = nullptr;
      check(sm_infer(maps.get(), cam.get(), tpl.get(), gmm.get(), options.dump().c_str(), &s));
      emit(g.out, take(s));
    } else if (eval->parsed()) {
      const std::string result = read_file(e_result);
      const std::string gt = read_file(e_gt);
      char* s = nullptr;
      if (e_sweep) {
        check(sm_sweep(result.c_str(), gt.c_str(), e_gt_index, &s));
      } else {
        CameraHandle cam;
        load_camera(e_camera.empty() ? e_result : e_camera, cam);
        check(sm_evaluate(result.c_str(), gt.c_str(), e_gt_index, cam.get(), e_tau_j,
                          e_tau_theta, &s));
      }
      emit(g.out, take(s));
    } else if (exp->parsed()) {
      Json cfg = config;
      if (g.seed) cfg["seed"] = *g.seed;
      if (!x_sweep_csv.empty()) cfg["sweep"] = true;
      char* report = nullptr;
      char* csv = nullptr;
      char* sweep = nullptr;
      check(sm_experiment(cfg.dump().c_str(), &report, &csv, &sweep));
      const std::string r = take(report), c = take(csv), w = take(sweep);
      emit(g.out, r);
      if (!x_csv.empty()) emit(x_csv, c);
      if (!x_sweep_csv.empty()) emit(x_sweep_csv, w);
    } else if (tune->parsed()) {
      char* s = nullptr;
      check(sm_tune(config.dump().c_str(), u_budget, seed_or(g, 1), u_held_out, &s));
      emit(g.out, take(s));
    } else if (info->parsed()) {
      MapsHandle maps;
      check(sm_maps_load(k_maps.c_str(), maps.out()));
      int channels = 0, width = 0, height = 0;
      float sigma = 0.0f;
      check(sm_maps_info(maps.get(), &channels, &width, &height, &sigma));
      std::vector<int> peaks(channels, 0);
      check(sm_maps_count_peaks(maps.get(), k_tau_m, peaks.data(), channels));
      Json j{{"channels", channels}, {"width", width}, {"height", height},
             {"sigma", sigma}, {"tau_m", k_tau_m}, {"peaks", peaks}};
      emit(g.out, j.dump(2));
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
