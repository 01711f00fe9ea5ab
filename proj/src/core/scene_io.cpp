// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#include "scenemock/scene_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "scenemock/error.hpp"

namespace scenemock {

namespace {

template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("malformed ") + what + ": " + e.what());
  }
}

Json vec_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vec_from(const Json& j, Eigen::Index expected = -1) {
  if (!j.is_array()) fail(ErrorCode::kFormat, "expected a number array");
  if (expected >= 0 && static_cast<Eigen::Index>(j.size()) != expected) {
    fail(ErrorCode::kFormat, "array has wrong length");
  }
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(ErrorCode::kFormat, "expected a number");
    v(i) = j[i].get<double>();
    if (!std::isfinite(v(i))) fail(ErrorCode::kFormat, "non-finite number");
  }
  return v;
}

Json mat_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec_json(m.row(r).transpose()));
  return a;
}

Eigen::MatrixXd mat_from(const Json& j, Eigen::Index cols = -1) {
  if (!j.is_array() || j.empty()) fail(ErrorCode::kFormat, "expected a non-empty matrix");
  const Eigen::Index c = cols >= 0 ? cols : static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(j.size(), c);
  for (std::size_t r = 0; r < j.size(); ++r) m.row(r) = vec_from(j[r], c).transpose();
  return m;
}

double number(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_number()) fail(ErrorCode::kFormat, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

Json stat_json(const Stat& s) { return Json{{"mean", s.mean}, {"std", s.std}, {"count", s.count}}; }

Json pr_json(const PrecisionRecall& p) {
  return Json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

const char* mode_name(OcclusionMode m) { return m == OcclusionMode::kOne ? "one" : "all"; }

}  // namespace

Json parse_json(const std::string& text) {
  return guarded("JSON", [&] { return Json::parse(text); });
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

Json to_json(const Camera& camera) {
  Json rot = Json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rot.push_back(camera.rotation()(r, c));
  }
  return Json{{"rotation", rot},
              {"focal_length", camera.focal_length()},
              {"position", vec_json(camera.position())},
              {"image_size", {camera.image_size().width, camera.image_size().height}},
              {"map_size", {camera.map_size().width, camera.map_size().height}}};
}

Camera camera_from_json(const Json& j) {
  return guarded("camera", [&] {
    const Eigen::VectorXd flat = vec_from(j.at("rotation"), 9);
    Mat3 rot;
    rot << flat(0), flat(1), flat(2), flat(3), flat(4), flat(5), flat(6), flat(7), flat(8);
    const Vec3 pos = vec_from(j.at("position"), 3);
    const auto size = [&](const char* key) {
      const Json& s = j.at(key);
      if (!s.is_array() || s.size() != 2) fail(ErrorCode::kFormat, "size must be [w, h]");
      return ImageSize{s[0].get<int>(), s[1].get<int>()};
    };
    return Camera(rot, number(j, "focal_length"), pos, size("image_size"), size("map_size"));
  });
}

Json to_json(const OrientedBox& box) {
  return Json{{"center", vec_json(box.center)},
              {"half_extents", vec_json(box.half_extents)},
              {"azimuth", box.azimuth}};
}

OrientedBox box_from_json(const Json& j) {
  return guarded("box", [&] {
    OrientedBox b;
    b.center = vec_from(j.at("center"), 3);
    b.half_extents = vec_from(j.at("half_extents"), 3);
    b.azimuth = number(j, "azimuth");
    if ((b.half_extents.array() <= 0.0).any()) {
      fail(ErrorCode::kFormat, "box half extents must be positive");
    }
    return b;
  });
}

Json database_to_json(std::span<const KeypointSet> database) {
  Json models = Json::array();
  for (const auto& s : database) {
    models.push_back(Json{{"id", s.id}, {"keypoints", mat_json(s.keypoints)}});
  }
  return models;
}

std::vector<KeypointSet> database_from_json(const Json& j) {
  return guarded("keypoint database", [&] {
    std::vector<KeypointSet> out;
    const Json& models = j.is_object() ? j.at("models") : j;
    if (!models.is_array()) fail(ErrorCode::kFormat, "database must be an array of models");
    for (const auto& m : models) {
      KeypointSet s;
      s.id = m.at("id").get<std::string>();
      s.keypoints = mat_from(m.at("keypoints"), 3);
      out.push_back(std::move(s));
    }
    return out;
  });
}

Json to_json(const TemplateModel& model) {
  Json members = Json::array();
  for (const auto& m : model.members()) {
    members.push_back(Json{{"id", m.set.id},
                           {"keypoints", mat_json(m.set.keypoints)},
                           {"coords", vec_json(m.coords)}});
  }
  return Json{{"keypoint_count", model.keypoint_count()},
              {"k", model.modes()},
              {"variance_fraction", model.variance_fraction()},
              {"mean", vec_json(model.mean())},
              {"eigenvalues", vec_json(model.eigenvalues())},
              {"eigenvectors", mat_json(model.eigenvectors())},
              {"database_projections", members}};
}

TemplateModel template_from_json(const Json& j) {
  return guarded("template", [&] {
    Eigen::VectorXd mean = vec_from(j.at("mean"));
    Eigen::VectorXd values = vec_from(j.at("eigenvalues"));
    Eigen::MatrixXd vectors = mat_from(j.at("eigenvectors"), mean.size());
    if (j.contains("k") && j.at("k").get<int>() != values.size()) {
      fail(ErrorCode::kFormat, "template k does not match the eigenvalue count");
    }
    std::vector<TemplateModel::Member> members;
    if (j.contains("database_projections")) {
      for (const auto& m : j.at("database_projections")) {
        TemplateModel::Member member;
        member.set.id = m.at("id").get<std::string>();
        member.set.keypoints = mat_from(m.at("keypoints"), 3);
        member.coords = vec_from(m.at("coords"), values.size());
        members.push_back(std::move(member));
      }
    }
    return TemplateModel::from_parts(std::move(mean), std::move(vectors), std::move(values),
                                     number(j, "variance_fraction"), std::move(members));
  });
}

Json to_json(const PairwiseGmm& gmm) {
  Json comps = Json::array();
  for (const auto& c : gmm.components()) {
    comps.push_back(Json{{"weight", c.weight},
                         {"mean", vec_json(c.mean)},
                         {"covariance", mat_json(c.covariance)}});
  }
  return Json{{"delta_r", gmm.delta_r()}, {"diag_bias", gmm.diag_bias()}, {"components", comps}};
}

PairwiseGmm gmm_from_json(const Json& j) {
  return guarded("mixture", [&] {
    std::vector<GaussianComponent> comps;
    for (const auto& c : j.at("components")) {
      GaussianComponent g;
      g.weight = number(c, "weight");
      g.mean = vec_from(c.at("mean"), 3);
      const Eigen::MatrixXd cov = mat_from(c.at("covariance"), 3);
      if (cov.rows() != 3) fail(ErrorCode::kFormat, "covariance must be 3 x 3");
      g.covariance = cov;
      comps.push_back(g);
    }
    return PairwiseGmm(std::move(comps), number(j, "delta_r"), number(j, "diag_bias"));
  });
}

Json to_json(const PlacementParams& p) {
  return Json{{"translation", {p.translation.x(), p.translation.y()}},
              {"azimuth", p.azimuth},
              {"scale", p.scale},
              {"deform", vec_json(p.deform)}};
}

PlacementParams placement_from_json(const Json& j) {
  return guarded("placement", [&] {
    PlacementParams p;
    p.translation = vec_from(j.at("translation"), 2);
    p.azimuth = number(j, "azimuth");
    p.scale = number(j, "scale");
    p.deform = vec_from(j.at("deform"));
    return p;
  });
}

Json to_json(const Scene& scene) {
  Json objects = Json::array();
  for (const auto& o : scene.objects) {
    Json obj = to_json(o.params);
    obj["model_id"] = o.model_id;
    obj["box"] = to_json(o.box);
    objects.push_back(std::move(obj));
  }
  Json occluders = Json::array();
  for (const auto& b : scene.occluders) occluders.push_back(to_json(b));
  return Json{{"objects", objects}, {"occluders", occluders}};
}

Scene scene_from_json(const Json& j) {
  return guarded("scene", [&] {
    Scene s;
    for (const auto& o : j.at("objects")) {
      SceneObject obj;
      obj.params = placement_from_json(o);
      obj.model_id = o.value("model_id", std::string());
      obj.box = box_from_json(o.at("box"));
      s.objects.push_back(std::move(obj));
    }
    if (j.contains("occluders")) {
      for (const auto& b : j.at("occluders")) s.occluders.push_back(box_from_json(b));
    }
    return s;
  });
}

Json scenes_to_json(std::span<const Scene> scenes, const Camera& camera) {
  Json arr = Json::array();
  for (const auto& s : scenes) arr.push_back(to_json(s));
  return Json{{"camera", to_json(camera)}, {"scenes", arr}};
}

std::vector<Scene> scenes_from_json(const Json& j) {
  return guarded("scenes", [&] {
    std::vector<Scene> out;
    for (const auto& s : j.at("scenes")) out.push_back(scene_from_json(s));
    return out;
  });
}

Json to_json(const InferredScene& scene, const Camera& camera) {
  Json objects = Json::array();
  for (const auto& o : scene.objects) {
    Json obj = to_json(o.params);
    obj["model_id"] = o.model_id;
    obj["box"] = to_json(o.box);
    obj["iteration"] = o.iteration;
    objects.push_back(std::move(obj));
  }
  Json iterations = Json::array();
  for (const auto& it : scene.iterations) {
    iterations.push_back(Json{{"refined", it.refined},
                              {"accepted", it.accepted},
                              {"candidates", it.candidates},
                              {"selected", it.selected}});
  }
  return Json{{"objects", objects},
              {"camera", to_json(camera)},
              {"iterations_used", scene.iterations_used},
              {"iterations", iterations}};
}

EvalScene eval_scene_from_json(const Json& j, int index) {
  return guarded("scene", [&] {
    const Json* scene = &j;
    if (j.contains("scenes")) {
      const Json& arr = j.at("scenes");
      if (index < 0 || index >= static_cast<int>(arr.size())) {
        fail(ErrorCode::kInvalidArgument, "scene index out of range");
      }
      scene = &arr[index];
    }
    EvalScene out;
    for (const auto& o : scene->at("objects")) {
      out.objects.push_back({box_from_json(o.at("box")), number(o, "azimuth"),
                             o.value("symmetry_order", 1)});
    }
    if (scene->contains("occluders")) {
      for (const auto& b : scene->at("occluders")) out.occluders.push_back(box_from_json(b));
    }
    return out;
  });
}

Json to_json(const MeasureReport& r) {
  return Json{{"iou3d", pr_json(r.iou3d)},
              {"iou2d", pr_json(r.iou2d)},
              {"loc", pr_json(r.loc)},
              {"locang", pr_json(r.locang)},
              {"angdiff_degrees", r.angdiff_degrees ? Json(*r.angdiff_degrees) : Json(nullptr)},
              {"tau_j", r.tau_j},
              {"tau_theta", r.tau_theta}};
}

std::string sweep_csv(std::span<const SweepPoint> points) {
  std::ostringstream out;
  out.precision(17);
  out << "tau_j,tau_theta,locang_precision,locang_recall,locang_f1\n";
  for (const auto& p : points) {
    out << p.tau_j << ',' << p.tau_theta << ',' << p.locang.precision << ','
        << p.locang.recall << ',' << p.locang.f1 << '\n';
  }
  return out.str();
}

namespace {

template <typename T>
void maybe(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ArrangementSpec arrangement_from_json(const Json& j, const ArrangementSpec& base) {
  return guarded("arrangement", [&] {
    if (!j.is_object()) fail(ErrorCode::kFormat, "arrangement must be a JSON object");
    ArrangementSpec a = base;
    if (j.contains("layout")) a.layout = parse_layout(j.at("layout").get<std::string>());
    maybe(j, "min_count", a.min_count);
    maybe(j, "max_count", a.max_count);
    maybe(j, "spacing", a.spacing);
    maybe(j, "spacing_jitter", a.spacing_jitter);
    maybe(j, "azimuth_jitter", a.azimuth_jitter);
    maybe(j, "azimuth_range", a.azimuth_range);
    maybe(j, "deform_shrink", a.deform_shrink);
    maybe(j, "depth", a.depth);
    maybe(j, "seed", a.seed);
    return a;
  });
}

Json to_json(const ArrangementSpec& a) {
  return Json{{"layout", layout_name(a.layout)},
              {"min_count", a.min_count},
              {"max_count", a.max_count},
              {"spacing", a.spacing},
              {"spacing_jitter", a.spacing_jitter},
              {"azimuth_jitter", a.azimuth_jitter},
              {"azimuth_range", a.azimuth_range},
              {"deform_shrink", a.deform_shrink},
              {"depth", a.depth},
              {"seed", a.seed}};
}

ExperimentConfig config_from_json(const Json& j) {
  return guarded("config", [&] {
    if (!j.is_object()) fail(ErrorCode::kFormat, "config must be a JSON object");
    ExperimentConfig c = ExperimentConfig::defaults();
    if (j.contains("hyper")) {
      const Json& h = j.at("hyper");
      maybe(h, "tau_m", c.hyper.tau_m);
      maybe(h, "tau_u", c.hyper.tau_u);
      maybe(h, "alpha", c.hyper.alpha);
      maybe(h, "beta", c.hyper.beta);
    }
    maybe(j, "sigma", c.sigma);
    maybe(j, "max_iterations", c.max_iterations);
    maybe(j, "database_size", c.database_size);
    maybe(j, "training_scenes", c.training_scenes);
    maybe(j, "gmm_components", c.gmm_components);
    maybe(j, "delta_r", c.delta_r);
    maybe(j, "tau_j", c.tau_j);
    maybe(j, "tau_theta", c.tau_theta);
    maybe(j, "occlusion_grid", c.occlusion_grid);
    maybe(j, "sweep", c.sweep);
    maybe(j, "seed", c.seed);
    if (j.contains("arrangement")) {
      c.arrangement = arrangement_from_json(j.at("arrangement"), c.arrangement);
    }
    if (j.contains("bins")) {
      c.bins.clear();
      for (const auto& b : j.at("bins")) {
        OcclusionBin bin;
        bin.name = b.value("name", std::string("bin_") + std::to_string(c.bins.size()));
        if (b.contains("drop")) {
          bin.degradation.drop_min = bin.degradation.drop_max = b.at("drop").get<double>();
        }
        maybe(b, "drop_min", bin.degradation.drop_min);
        maybe(b, "drop_max", bin.degradation.drop_max);
        const std::string mode = b.value("mode", std::string("all"));
        if (mode != "all" && mode != "one") fail(ErrorCode::kFormat, "bin mode must be all or one");
        bin.degradation.mode = mode == "one" ? OcclusionMode::kOne : OcclusionMode::kAll;
        maybe(b, "scenes", bin.scenes);
        c.bins.push_back(std::move(bin));
      }
    }
    if (j.contains("conditions")) {
      c.conditions.clear();
      for (const auto& name : j.at("conditions")) {
        const std::string s = name.get<std::string>();
        bool found = false;
        for (Condition cond : {Condition::kFull, Condition::kNoPairwise,
                               Condition::kSingleIteration}) {
          if (s == condition_name(cond)) {
            c.conditions.push_back(cond);
            found = true;
          }
        }
        if (!found) fail(ErrorCode::kFormat, "unknown condition: " + s);
      }
    }
    c.validate();
    return c;
  });
}

Json to_json(const ExperimentConfig& c) {
  Json bins = Json::array();
  for (const auto& b : c.bins) {
    bins.push_back(Json{{"name", b.name},
                        {"drop_min", b.degradation.drop_min},
                        {"drop_max", b.degradation.drop_max},
                        {"mode", mode_name(b.degradation.mode)},
                        {"scenes", b.scenes}});
  }
  Json conds = Json::array();
  for (Condition cond : c.conditions) conds.push_back(condition_name(cond));
  return Json{{"hyper",
               {{"tau_m", c.hyper.tau_m},
                {"tau_u", c.hyper.tau_u},
                {"alpha", c.hyper.alpha},
                {"beta", c.hyper.beta}}},
              {"sigma", c.sigma},
              {"max_iterations", c.max_iterations},
              {"database_size", c.database_size},
              {"arrangement", to_json(c.arrangement)},
              {"training_scenes", c.training_scenes},
              {"gmm_components", c.gmm_components},
              {"delta_r", c.delta_r},
              {"bins", bins},
              {"conditions", conds},
              {"tau_j", c.tau_j},
              {"tau_theta", c.tau_theta},
              {"occlusion_grid", c.occlusion_grid},
              {"sweep", c.sweep},
              {"seed", c.seed}};
}

Json to_json(const ExperimentReport& report, const ExperimentConfig& config) {
  Json bins = Json::array();
  for (const auto& b : report.bins) {
    Json conds = Json::object();
    for (const auto& c : b.conditions) {
      Json measures = Json::object();
      for (const auto& [key, stat] : c.measures) measures[key] = stat_json(stat);
      Json cj{{"measures", measures},
              {"angdiff_degrees", stat_json(c.angdiff_degrees)},
              {"position_error_m", stat_json(c.position_error)},
              {"azimuth_error_deg", stat_json(c.azimuth_error)},
              {"objects_found", stat_json(c.objects_found)}};
      if (!c.sweep.empty()) {
        Json sweep = Json::array();
        for (const auto& p : c.sweep) {
          sweep.push_back(Json{{"tau_j", p.tau_j}, {"tau_theta", p.tau_theta},
                               {"locang", pr_json(p.locang)}});
        }
        cj["sweep"] = sweep;
      }
      conds[condition_name(c.condition)] = cj;
    }
    bins.push_back(Json{{"name", b.name},
                        {"drop_min", b.degradation.drop_min},
                        {"drop_max", b.degradation.drop_max},
                        {"mode", mode_name(b.degradation.mode)},
                        {"scenes", b.scenes},
                        {"gt_objects", stat_json(b.gt_objects)},
                        {"occlusion", stat_json(b.occlusion)},
                        {"occlusion_histogram", b.occlusion_histogram},
                        {"conditions", conds}});
  }
  return Json{{"config", to_json(config)},
              {"template_modes", report.template_modes},
              {"gmm_components", report.gmm_components},
              {"bins", bins}};
}

std::string experiment_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "bin,condition,measure,mean,std,count\n";
  for (const auto& b : report.bins) {
    for (const auto& c : b.conditions) {
      auto row = [&](const std::string& key, const Stat& s) {
        out << b.name << ',' << condition_name(c.condition) << ',' << key << ',' << s.mean << ','
            << s.std << ',' << s.count << '\n';
      };
      for (const auto& [key, stat] : c.measures) row(key, stat);
      row("angdiff_degrees", c.angdiff_degrees);
      row("position_error_m", c.position_error);
      row("azimuth_error_deg", c.azimuth_error);
      row("objects_found", c.objects_found);
    }
  }
  return out.str();
}

std::string experiment_sweep_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "bin,condition,tau_j,tau_theta,locang_precision,locang_recall,locang_f1\n";
  for (const auto& b : report.bins) {
    for (const auto& c : b.conditions) {
      for (const auto& p : c.sweep) {
        out << b.name << ',' << condition_name(c.condition) << ',' << p.tau_j << ','
            << p.tau_theta << ',' << p.locang.precision << ',' << p.locang.recall << ','
            << p.locang.f1 << '\n';
      }
    }
  }
  return out.str();
}

Json to_json(const TuneResult& result) {
  auto hyper = [](const HyperParams& h) {
    return Json{{"tau_m", h.tau_m}, {"tau_u", h.tau_u}, {"alpha", h.alpha}, {"beta", h.beta}};
  };
  Json trials = Json::array();
  for (const auto& t : result.trials) {
    trials.push_back(Json{{"hyper", hyper(t.hyper)}, {"objective", t.objective}});
  }
  return Json{{"best", hyper(result.best)},
              {"best_objective", result.best_objective},
              {"trials", trials}};
}

}  // namespace scenemock
