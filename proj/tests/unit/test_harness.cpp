// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "scenemock/error.hpp"
#include "scenemock/harness.hpp"
#include "scenemock/scene_stats.hpp"

using namespace scenemock;
using fixture::chair_template;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig c = ExperimentConfig::defaults();
  c.database_size = 12;
  c.training_scenes = 30;
  c.gmm_components = 2;
  c.arrangement.min_count = 1;
  c.arrangement.max_count = 2;
  c.bins.resize(1);
  c.bins[0].scenes = 2;
  return c;
}

}  // namespace

TEST_CASE("procedural database") {
  const auto db = generate_chair_database(10, 5);
  REQUIRE(db.size() == 10);
  CHECK(db[0].id == "chair_000");
  CHECK(db[9].id == "chair_009");
  for (const auto& s : db) CHECK_NOTHROW(validate_keypoint_set(s, kDefaultKeypointCount));
  const auto again = generate_chair_database(10, 5);
  for (std::size_t i = 0; i < db.size(); ++i) CHECK(db[i].keypoints == again[i].keypoints);
  CHECK(TemplateModel::build(db).modes() >= 1);
}

TEST_CASE("layout names") {
  for (Layout l : {Layout::kRow, Layout::kFacingPairs, Layout::kRingAroundTable, Layout::kRandomScatter,
                   Layout::kMixed})
    CHECK(parse_layout(layout_name(l)) == l);
  CHECK_THROWS_AS(parse_layout("spiral"), Error);
}

TEST_CASE("row with zero jitter is collinear") {
  const Camera cam = Camera::harness_default();
  ArrangementSpec spec;
  spec.min_count = spec.max_count = 3;
  spec.deform_shrink = 0.0;
  const auto scenes = generate_scenes(spec, 5, chair_template(), cam);
  for (const auto& s : scenes) {
    REQUIRE(s.objects.size() == 3);
    const Vec2 a = s.objects[0].params.translation, b = s.objects[1].params.translation,
               c = s.objects[2].params.translation;
    const Vec2 u = b - a, v = c - a;
    CHECK(std::abs(u.x() * v.y() - u.y() * v.x()) < 1e-12);
    CHECK(u.norm() == doctest::Approx(0.8));
    CHECK(s.objects[0].params.azimuth == s.objects[1].params.azimuth);
    CHECK(s.objects[1].params.azimuth == s.objects[2].params.azimuth);
  }
}

TEST_CASE("scene generation is deterministic and valid") {
  const Camera cam = Camera::harness_default();
  for (Layout l : {Layout::kRow, Layout::kFacingPairs, Layout::kRingAroundTable, Layout::kRandomScatter,
                   Layout::kMixed}) {
    ArrangementSpec spec;
    spec.layout = l;
    spec.spacing_jitter = 0.05;
    spec.azimuth_jitter = 0.05;
    spec.seed = 42;
    const auto a = generate_scenes(spec, 8, chair_template(), cam);
    const auto b = generate_scenes(spec, 8, chair_template(), cam);
    REQUIRE(a.size() == 8);
    for (std::size_t s = 0; s < a.size(); ++s) {
      CHECK(validate_scene(a[s], chair_template(), cam));
      REQUIRE(a[s].objects.size() == b[s].objects.size());
      CHECK(a[s].objects.size() >= 1);
      CHECK(a[s].objects.size() <= 6);
      for (std::size_t i = 0; i < a[s].objects.size(); ++i) {
        CHECK(a[s].objects[i].params.translation == b[s].objects[i].params.translation);
        CHECK(a[s].objects[i].params.azimuth == b[s].objects[i].params.azimuth);
        CHECK(a[s].objects[i].params.deform == b[s].objects[i].params.deform);
        CHECK(a[s].objects[i].model_id == b[s].objects[i].model_id);
      }
      if (l == Layout::kRingAroundTable) CHECK(a[s].occluders.size() == 1);
    }
  }
}

TEST_CASE("facing pairs plant a known relative pose") {
  const Camera cam = Camera::harness_default();
  ArrangementSpec spec;
  spec.layout = Layout::kFacingPairs;
  spec.min_count = spec.max_count = 2;
  spec.spacing = 1.0;
  spec.seed = 3;
  const auto scenes = generate_scenes(spec, 40, chair_template(), cam);
  std::vector<std::vector<ObjectPose>> poses;
  for (const auto& s : scenes) {
    std::vector<ObjectPose> p;
    for (const auto& o : s.objects) p.push_back(o.params.pose());
    poses.push_back(p);
  }
  const auto pairs = extract_pairs(poses);
  REQUIRE(pairs.size() == 80);
  for (const auto& r : pairs) {
    CHECK(r.delta_t.norm() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(std::abs(r.delta_theta) - kPi) < 1e-9);
  }
  const PairwiseGmm gmm = fit_gmm(pairs, 1, 1);
  const Eigen::Vector3d m = gmm.components()[0].mean;
  CHECK(std::abs(m.x() - 0.0) < 0.05);
  CHECK(std::abs(m.y() + 1.0) < 0.05);
  CHECK(std::abs(wrap_angle(m.z() - kPi)) < 0.05);
}

TEST_CASE("rendering is deterministic and respects degradation") {
  const Camera cam = Camera::harness_default();
  ArrangementSpec spec;
  spec.min_count = spec.max_count = 3;
  const auto scenes = generate_scenes(spec, 1, chair_template(), cam);
  const double sigma = default_sigma(cam.map_size().width);
  const KeypointMapStack clean = render_scene(scenes[0], chair_template(), cam, sigma, {}, 1);
  CHECK(clean == render_scene(scenes[0], chair_template(), cam, sigma, {}, 2));
  const Degradation all{1.0, 1.0, OcclusionMode::kAll};
  const KeypointMapStack gone = render_scene(scenes[0], chair_template(), cam, sigma, all, 1);
  for (float v : gone.values()) CHECK(v == 0.0f);
  const Degradation one{1.0, 1.0, OcclusionMode::kOne};
  const KeypointMapStack partial = render_scene(scenes[0], chair_template(), cam, sigma, one, 1);
  CHECK(extract_locations(partial, 0.25).total() == 16);
  CHECK(extract_locations(clean, 0.25).total() == 24);
}

TEST_CASE("summaries") {
  const Stat s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(1.25)));
  CHECK(s.count == 4);
  CHECK(summarize({}).count == 0);
}

TEST_CASE("config validation") {
  ExperimentConfig c = ExperimentConfig::defaults();
  CHECK_NOTHROW(c.validate());
  CHECK(c.bins.size() == 4);
  c.hyper.tau_u = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = ExperimentConfig::defaults();
  c.bins[1].degradation.drop_max = 1.2;
  CHECK_THROWS_AS(c.validate(), Error);
  c = ExperimentConfig::defaults();
  c.arrangement.min_count = 4;
  c.arrangement.max_count = 3;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("random search") {
  const TuneResult one = random_search([](const HyperParams&) { return 0.0; }, 1, 5);
  REQUIRE(one.trials.size() == 1);
  CHECK(one.best.tau_m == one.trials[0].hyper.tau_m);

  const TuneResult flat = random_search([](const HyperParams&) { return 0.3; }, 10, 5);
  CHECK(flat.best.alpha == flat.trials[0].hyper.alpha);
  CHECK(flat.best.beta == flat.trials[0].hyper.beta);
  for (const auto& t : flat.trials) {
    CHECK(t.hyper.tau_m >= 0.05);
    CHECK(t.hyper.tau_m <= 0.5);
    CHECK(t.hyper.alpha >= 0.05);
    CHECK(t.hyper.alpha <= 1.0);
  }

  auto peaked = [](const HyperParams& h) {
    return -std::pow(h.tau_m - 0.25, 2) - std::pow(h.tau_u - 0.21, 2) - std::pow(h.alpha - 0.61, 2) -
           std::pow(h.beta - 0.14, 2);
  };
  const TuneResult r = random_search(peaked, 50, 9);
  for (const auto& t : r.trials) CHECK(r.best_objective >= t.objective);
  CHECK(r.best_objective == peaked(r.best));
  const TuneResult again = random_search(peaked, 50, 9);
  CHECK(again.best.tau_m == r.best.tau_m);
  CHECK_THROWS_AS(random_search(peaked, 0, 9), Error);
}

TEST_CASE("no-pairwise experiment never evaluates the mixture") {
  ExperimentConfig c = tiny_config();
  c.conditions = {Condition::kNoPairwise};
  const ExperimentAssets assets = build_assets(c);
  CHECK_FALSE(assets.gmm.has_value());
  reset_gmm_evaluation_count();
  const ExperimentReport r = run_experiment(c, assets);
  CHECK(gmm_evaluation_count() == 0);
  REQUIRE(r.bins.size() == 1);
  REQUIRE(r.bins[0].conditions.size() == 1);
  CHECK(r.bins[0].conditions[0].measure("locang.f1").count == 2);
}

TEST_CASE("tune on a tiny config") {
  ExperimentConfig c = tiny_config();
  const TuneResult r = tune(c, 2, 4, 2);
  REQUIRE(r.trials.size() == 2);
  for (const auto& t : r.trials) {
    CHECK(t.objective >= 0.0);
    CHECK(t.objective <= 1.0);
    CHECK(r.best_objective >= t.objective);
  }
}
