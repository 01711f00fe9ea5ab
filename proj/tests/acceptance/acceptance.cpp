// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "metric_cases.hpp"
#include "oracles.hpp"
#include "scenemock/harness.hpp"
#include "scenemock/scene_io.hpp"
#include "scenemock/selection.hpp"

using namespace scenemock;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < limit_seconds;
  const bool pass = o.ok && in_time;
  if (!pass) ++failures;
  std::printf("%s %d %s: %s; %.1fs (limit %.0fs)%s\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
              secs, limit_seconds, in_time ? "" : " over time limit");
  std::fflush(stdout);
}

const ConditionReport& condition(const BinReport& bin, Condition c) {
  for (const auto& r : bin.conditions)
    if (r.condition == c) return r;
  throw std::runtime_error("missing condition");
}

Outcome closed_loop() {
  ExperimentConfig c = ExperimentConfig::defaults();
  c.arrangement.layout = Layout::kMixed;
  c.arrangement.min_count = 1;
  c.arrangement.max_count = 6;
  c.bins = {OcclusionBin{"clean", {}, 50}};
  c.conditions = {Condition::kFull};
  const ExperimentReport r = run_experiment(c);
  const ConditionReport& full = condition(r.bins[0], Condition::kFull);
  const double f1 = full.measure("locang.f1").mean;
  const double pos = full.position_error.mean;
  const double az = full.azimuth_error.mean;
  // A mean of 1 over scenes means every scene scored 1.
  return {f1 == 1.0 && pos < 0.05 && az < 2.0,
          format("LocAng F1 %.4f over %d scenes, position error %.4f m, azimuth error %.3f deg", f1,
                 full.measure("locang.f1").count, pos, az)};
}

Outcome ablation() {
  ExperimentConfig c = ExperimentConfig::defaults();
  c.arrangement.layout = Layout::kRow;
  c.arrangement.spacing = 0.7;
  c.arrangement.min_count = 3;
  c.arrangement.max_count = 4;
  c.arrangement.spacing_jitter = 0.03;
  c.arrangement.azimuth_jitter = 0.03;
  c.bins = {OcclusionBin{"drop_0.60-0.75", {0.6, 0.75, OcclusionMode::kOne}, 100}};
  const ExperimentReport r = run_experiment(c);
  const auto& bin = r.bins[0];
  const auto& full = condition(bin, Condition::kFull);
  const auto& np = condition(bin, Condition::kNoPairwise);
  const auto& single = condition(bin, Condition::kSingleIteration);
  const double fr = full.measure("locang.recall").mean, fp = full.measure("locang.precision").mean;
  const double nr = np.measure("locang.recall").mean;
  const double sr = single.measure("locang.recall").mean, sp = single.measure("locang.precision").mean;
  const bool ok = fr - nr >= 0.10 && sp >= fp && sr <= fr;
  return {ok, format("recall full %.3f / no-pairwise %.3f / single %.3f, precision full %.3f / single %.3f",
                     fr, nr, sr, fp, sp)};
}

Outcome solver() {
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n = 1 + static_cast<int>(seed % 12);
    const SelectionProblem p = oracle::random_problem(n, 5000 + seed);
    const double best = oracle::enumerate_min(p);
    if (p.energy(solve(p)) != best) ++mismatches;
  }
  return {mismatches == 0, format("%d of 100 problems differ from enumeration", mismatches)};
}

Outcome gradients() {
  using fixture::chair_template;
  const Camera cam = Camera::harness_default();
  const TemplateModel& model = chair_template();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ux(-0.8, 0.8), uz(3.2, 5.0), ua(-kPi, kPi), us(0.85, 1.15),
      ud(-1.0, 1.0);
  auto random_x = [&](const FitObjective& obj) {
    PlacementParams p = fixture::placement(ux(rng), uz(rng), ua(rng), us(rng));
    for (int i = 0; i < model.modes(); ++i) p.deform(i) = ud(rng) * std::sqrt(model.eigenvalues()(i));
    return obj.pack(p);
  };
  double worst_pair = 0.0, worst_map = 0.0, worst_prior = 0.0;

  FitProblem pair;
  pair.camera = &cam;
  pair.model = &model;
  pair.stage = FitStage::kPairInit;
  pair.anchors = AnchorPair{AnchorObservation{1, Vec2(70, 72)}, AnchorObservation{7, Vec2(64, 38)}};
  FitObjective pair_obj(pair);
  for (int t = 0; t < 100; ++t) worst_pair = std::max(worst_pair, fixture::jacobian_gap(pair_obj, random_x(pair_obj)));

  const KeypointMapStack maps = fixture::render_placements(
      cam, {fixture::placement(-0.5, 4.0, 0.3), fixture::placement(0.4, 4.4, -0.2)});
  FitProblem refine;
  refine.camera = &cam;
  refine.model = &model;
  refine.stage = FitStage::kMapRefine;
  refine.maps = &maps;
  FitObjective map_obj(refine);
  for (int t = 0; t < 100;) {
    const Eigen::VectorXd x = random_x(map_obj);
    bool clear = true;
    for (const Vec2& z : fixture::project_placement(cam, map_obj.unpack(x)))
      clear = clear && fixture::kink_margin(maps, z) > 1e-3;
    if (!clear) continue;
    worst_map = std::max(worst_map, fixture::jacobian_gap(map_obj, x));
    ++t;
  }

  // Max-Mixture rows alone: flat maps leave only the prior and regulariser.
  const KeypointMapStack flat(8, 128, 96, 2.0f);
  const PairwiseGmm gmm = fixture::row_mixture();
  FitProblem prior = refine;
  prior.maps = &flat;
  prior.prior = FitPrior{{ObjectPose{Vec2(-0.3, 4.0), 0.4}, ObjectPose{Vec2(0.5, 4.5), -0.6}}, &gmm};
  FitObjective prior_obj(prior);
  int with_terms = 0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd x = random_x(prior_obj);
    worst_prior = std::max(worst_prior, fixture::jacobian_gap(prior_obj, x));
    with_terms += prior_obj.active_prior_terms() > 0;
  }
  const bool ok = worst_pair < 1e-4 && worst_map < 1e-4 && worst_prior < 1e-4 && with_terms > 50;
  return {ok, format("max relative gap: pair %.2e, map %.2e, max-mixture %.2e (%d points with prior terms)",
                     worst_pair, worst_map, worst_prior, with_terms)};
}

Outcome gmm_recovery() {
  const auto parts = fixture::two_planted_components();
  const auto samples = fixture::planted_samples(parts, 5000, 2024);
  const PairwiseGmm gmm = fit_gmm(samples, 2, 7);
  const auto err = fixture::recovery_error(gmm, parts);
  const int bad = fixture::sandwich_violations(gmm, 1000, 99);
  const bool ok = err.mean < 0.05 && err.weight < 0.05 && err.covariance < 0.10 && bad == 0;
  return {ok, format("mean gap %.4f, weight gap %.4f, covariance gap %.3f, sandwich violations %d", err.mean,
                     err.weight, err.covariance, bad)};
}

Outcome metrics_suite() {
  const auto failed = metric_cases::trivial_failures();
  const double axis = metric_cases::voxel_gap(50, false, 11);
  const double rotated = metric_cases::voxel_gap(20, true, 12);
  std::string names;
  for (const auto& f : failed) names += " [" + f + "]";
  return {failed.empty() && axis < 0.02 && rotated < 0.02,
          format("%zu example failures%s, voxel gap axis-aligned %.4f, rotated %.4f", failed.size(),
                 names.c_str(), axis, rotated)};
}

ExperimentConfig small_config() {
  ExperimentConfig c = ExperimentConfig::defaults();
  c.database_size = 20;
  c.training_scenes = 60;
  c.arrangement.min_count = 2;
  c.arrangement.max_count = 4;
  c.arrangement.spacing_jitter = 0.05;
  c.arrangement.azimuth_jitter = 0.05;
  for (auto& b : c.bins) b.scenes = 3;
  return c;
}

Outcome sweep() {
  ExperimentConfig c = small_config();
  c.bins = {OcclusionBin{"drop_0.00", {}, 4}, OcclusionBin{"drop_0.50", {0.5, 0.5, OcclusionMode::kAll}, 4}};
  c.sweep = true;
  const ExperimentReport r = run_experiment(c);
  const auto js = default_tau_j_grid();
  const auto ths = default_tau_theta_grid();
  int violations = 0, points = 0;
  for (const auto& bin : r.bins)
    for (const auto& cond : bin.conditions) {
      const auto& s = cond.sweep;
      if (s.size() != js.size() * ths.size()) return {false, "sweep grid has the wrong size"};
      for (std::size_t a = 0; a < js.size(); ++a)
        for (std::size_t b = 0; b < ths.size(); ++b) {
          ++points;
          const double f = s[a * ths.size() + b].locang.f1;
          // Stricter IoU threshold (larger tau_j) never helps.
          if (a > 0 && f > s[(a - 1) * ths.size() + b].locang.f1) ++violations;
          // Stricter angle threshold (smaller tau_theta) never helps.
          if (b > 0 && s[a * ths.size() + b - 1].locang.f1 > f) ++violations;
        }
    }
  return {violations == 0, format("%d violations over %d grid points", violations, points)};
}

Outcome determinism() {
  const ExperimentConfig c = small_config();
  const std::string a = to_json(run_experiment(c), c).dump(2);
  const std::string b = to_json(run_experiment(c), c).dump(2);
  return {a == b, format("reports of %zu and %zu bytes %s", a.size(), b.size(), a == b ? "identical" : "differ")};
}

}  // namespace

int main() {
  criterion(1, "closed-loop exactness", 60, closed_loop);
  criterion(2, "ablation directionality", 600, ablation);
  criterion(3, "solver optimality", 30, solver);
  criterion(4, "gradient correctness", 10, gradients);
  criterion(5, "mixture recovery", 5, gmm_recovery);
  criterion(6, "metric suite", 20, metrics_suite);
  criterion(7, "threshold sweep monotonicity", 120, sweep);
  criterion(8, "determinism", 600, determinism);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
