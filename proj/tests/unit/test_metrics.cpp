// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "metric_cases.hpp"
#include "scenemock/error.hpp"
#include "scenemock/metrics.hpp"

using namespace scenemock;
using metric_cases::cube;
using metric_cases::object;

namespace {

EvalScene random_scene(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> x(-2.0, 2.0), z(3.0, 6.0), h(0.2, 0.4), a(-180.0, 180.0);
  EvalScene s;
  for (int i = 0; i < n; ++i) {
    OrientedBox b = cube(x(rng), 0.0, z(rng), h(rng), a(rng) * kPi / 180);
    b.center.y() = b.half_extents.y();
    s.objects.push_back({b, b.azimuth, 1});
  }
  return s;
}

EvalScene perturb(const EvalScene& s, std::mt19937_64& rng, double pos, double ang_deg) {
  std::normal_distribution<double> n(0.0, 1.0);
  EvalScene out = s;
  for (auto& o : out.objects) {
    o.box.center.x() += pos * n(rng);
    o.box.center.z() += pos * n(rng);
    o.azimuth += ang_deg * kPi / 180 * n(rng);
    o.box.azimuth = o.azimuth;
  }
  return out;
}

}  // namespace

TEST_CASE("hand-checkable metric examples") {
  const auto failed = metric_cases::trivial_failures();
  for (const auto& f : failed) MESSAGE("failed: " << f);
  CHECK(failed.empty());
}

TEST_CASE("obb iou against voxel oracle") {
  CHECK(metric_cases::voxel_gap(10, false, 1) < 0.02);
  CHECK(metric_cases::voxel_gap(5, true, 2) < 0.02);
}

TEST_CASE("correspondence matches a linear scan") {
  std::mt19937_64 rng(4);
  const Camera cam = Camera::harness_default();
  for (int t = 0; t < 20; ++t) {
    const EvalScene target = random_scene(rng, 5);
    const EvalScene src = perturb(target, rng, 0.2, 10.0);
    for (const auto& o : src.objects) {
      for (IouSpace space : {IouSpace::k3d, IouSpace::k2d}) {
        int best = -1;
        double best_iou = 0.0;
        for (int k = 0; k < 5; ++k) {
          const double v = space == IouSpace::k3d
                               ? obb_iou_3d(o.box, target.objects[k].box)
                               : rect_iou(projected_rect(o.box, cam), projected_rect(target.objects[k].box, cam));
          if (best < 0 || v > best_iou) {
            best = k;
            best_iou = v;
          }
        }
        const auto c = max_iou_correspondence(o, target, space, &cam);
        CHECK(c.index == best);
        CHECK(c.iou == best_iou);
      }
    }
  }
}

TEST_CASE("measure ordering and role symmetry") {
  std::mt19937_64 rng(7);
  const Camera cam = Camera::harness_default();
  for (int t = 0; t < 30; ++t) {
    const EvalScene gt = random_scene(rng, 4);
    EvalScene res = perturb(gt, rng, 0.15, 20.0);
    if (t % 3 == 0) res.objects.pop_back();
    const MeasureReport a = evaluate(res, gt, cam);
    const MeasureReport b = evaluate(gt, res, cam);
    CHECK(a.locang.precision <= a.loc.precision);
    CHECK(a.locang.recall <= a.loc.recall);
    CHECK(a.loc.precision <= 1.0);
    CHECK(a.iou3d.precision == b.iou3d.recall);
    CHECK(a.iou3d.recall == b.iou3d.precision);
    CHECK(a.iou2d.precision == b.iou2d.recall);
    CHECK(a.loc.precision == b.loc.recall);
  }
}

TEST_CASE("measures are invariant to a joint rigid motion") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 10; ++t) {
    const EvalScene gt = random_scene(rng, 4);
    const EvalScene res = perturb(gt, rng, 0.1, 10.0);
    const double turn = 0.7, dx = 1.3, dz = -0.4;
    auto move = [&](EvalScene s) {
      for (auto& o : s.objects) {
        const Vec2 p = rotate_ground(turn, Vec2(o.box.center.x(), o.box.center.z()));
        o.box.center.x() = p.x() + dx;
        o.box.center.z() = p.y() + dz;
        o.box.azimuth += turn;
        o.azimuth += turn;
      }
      return s;
    };
    const EvalScene gt2 = move(gt), res2 = move(res);
    CHECK(loc_measure(res, gt, 0.25) == loc_measure(res2, gt2, 0.25));
    CHECK(locang_measure(res, gt, 0.25, 15) == locang_measure(res2, gt2, 0.25, 15));
    for (std::size_t i = 0; i < res.objects.size(); ++i) {
      const auto a = max_iou_correspondence(res.objects[i], gt, IouSpace::k3d);
      const auto b = max_iou_correspondence(res2.objects[i], gt2, IouSpace::k3d);
      CHECK(a.index == b.index);
      CHECK(a.iou == doctest::Approx(b.iou).epsilon(1e-9));
    }
  }
}

TEST_CASE("empty scenes") {
  const Camera cam = Camera::harness_default();
  const EvalScene gt{{object(cube(0, 0.5, 4), 0)}, {}};
  const MeasureReport r = evaluate(EvalScene{}, gt, cam);
  CHECK(r.loc.precision == 0.0);
  CHECK(r.loc.recall == 0.0);
  CHECK(r.locang.f1 == 0.0);
  CHECK_FALSE(r.angdiff_degrees.has_value());
}

TEST_CASE("threshold sweep is monotone") {
  std::mt19937_64 rng(3);
  const auto js = default_tau_j_grid();
  const auto ths = default_tau_theta_grid();
  CHECK(js.size() == 19);
  CHECK(js.front() == doctest::Approx(0.05));
  CHECK(js.back() == doctest::Approx(0.95));
  for (int t = 0; t < 10; ++t) {
    const EvalScene gt = random_scene(rng, 5);
    const EvalScene res = perturb(gt, rng, 0.1, 25.0);
    const auto sweep = threshold_sweep(res, gt, js, ths);
    REQUIRE(sweep.size() == js.size() * ths.size());
    for (std::size_t a = 0; a < js.size(); ++a)
      for (std::size_t b = 0; b < ths.size(); ++b) {
        const auto& p = sweep[a * ths.size() + b];
        CHECK(p.tau_j == js[a]);
        CHECK(p.tau_theta == ths[b]);
        if (a > 0) CHECK(p.locang.f1 <= sweep[(a - 1) * ths.size() + b].locang.f1);
        if (b > 0) CHECK(sweep[a * ths.size() + b - 1].locang.f1 <= p.locang.f1);
      }
  }
}

TEST_CASE("half-covered box against a dense reference grid") {
  const Camera cam = metric_cases::forward_camera();
  OrientedBox back = cube(0, 0, 3, 1.0);
  OrientedBox front;
  front.center = Vec3(0.5, 0.0, 1.5);
  front.half_extents = Vec3(0.5, 2.0, 0.3);
  const EvalScene s{{{back, 0.0, 1}, {front, 0.0, 1}}, {}};
  const double reference = occlusion_score(s, cam, 512).per_object[0];
  CHECK(reference == doctest::Approx(0.5).epsilon(0.01));
  for (int n : {16, 32, 64, 128}) {
    const auto r = occlusion_score(s, cam, n);
    CHECK(std::abs(r.per_object[0] - reference) <= 2.0 / n);
    CHECK(r.per_object[1] == 0.0);
  }
}

TEST_CASE("occluders block rays and histogram bins") {
  const Camera cam = metric_cases::forward_camera();
  EvalScene s{{object(cube(0, 0, 6), 0), object(cube(40, 0, 6), 0)}, {cube(0, 0, 3)}};
  const auto r = occlusion_score(s, cam, 32);
  CHECK(r.per_object[0] == 1.0);
  CHECK(r.per_object[1] == 1.0);  // outside the view: never hit
  CHECK(r.histogram == std::vector<int>{0, 0, 0, 2});
  CHECK(occlusion_bin(0.0, r.bin_edges) == 0);
  CHECK(occlusion_bin(0.3, r.bin_edges) == 1);
  CHECK(occlusion_bin(0.75, r.bin_edges) == 3);
  CHECK_THROWS_AS(occlusion_score(s, cam, 4), Error);
}
