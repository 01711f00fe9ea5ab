// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#include "scenemock/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scenemock/error.hpp"

namespace scenemock {

Rect projected_rect(const OrientedBox& box, const Camera& camera) {
  Rect r{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
         -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  bool any = false;
  for (const Vec3& corner : box.corners()) {
    if (camera.to_camera(corner).z() <= 1e-6) continue;
    const Vec2 p = camera.project(corner);
    r.x0 = std::min(r.x0, p.x());
    r.y0 = std::min(r.y0, p.y());
    r.x1 = std::max(r.x1, p.x());
    r.y1 = std::max(r.y1, p.y());
    any = true;
  }
  return any ? r : Rect{};
}

double rect_iou(const Rect& a, const Rect& b) {
  const Rect inter{std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1),
                   std::min(a.y1, b.y1)};
  const double i = inter.area();
  const double u = a.area() + b.area() - i;
  return u > 0.0 ? i / u : 0.0;
}

Correspondence max_iou_correspondence(const EvalObject& object, const EvalScene& target,
                                      IouSpace space, const Camera* camera) {
  require(space == IouSpace::k3d || camera != nullptr, "2D IoU needs a camera");
  Correspondence best;
  const Rect source_rect =
      space == IouSpace::k2d ? projected_rect(object.box, *camera) : Rect{};
  for (int i = 0; i < static_cast<int>(target.objects.size()); ++i) {
    const OrientedBox& box = target.objects[i].box;
    const double iou = space == IouSpace::k3d
                           ? obb_iou_3d(object.box, box)
                           : rect_iou(source_rect, projected_rect(box, *camera));
    if (best.index < 0 || iou > best.iou) best = {i, iou};
  }
  return best;
}

double angle_difference_degrees(double a, double b, int symmetry_order) {
  require(symmetry_order >= 1, "symmetry order must be at least 1");
  const double period = 2.0 * kPi / symmetry_order;
  double d = std::fmod(std::abs(a - b), period);
  d = std::min(d, period - d);
  return d * 180.0 / kPi;
}

namespace {

template <typename Pass>
double located_fraction(const EvalScene& source, const EvalScene& target, double tau_j,
                        Pass pass) {
  if (source.objects.empty()) return 0.0;
  int hits = 0;
  for (const auto& o : source.objects) {
    const Correspondence c = max_iou_correspondence(o, target, IouSpace::k3d);
    if (c.index >= 0 && c.iou > tau_j && pass(o, target.objects[c.index])) ++hits;
  }
  return static_cast<double>(hits) / source.objects.size();
}

}  // namespace

double iou_measure(const EvalScene& source, const EvalScene& target, IouSpace space,
                   const Camera& camera) {
  if (source.objects.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& o : source.objects) {
    sum += max_iou_correspondence(o, target, space, &camera).iou;
  }
  return sum / source.objects.size();
}

double loc_measure(const EvalScene& source, const EvalScene& target, double tau_j) {
  return located_fraction(source, target, tau_j,
                          [](const EvalObject&, const EvalObject&) { return true; });
}

double locang_measure(const EvalScene& source, const EvalScene& target, double tau_j,
                      double tau_theta) {
  return located_fraction(source, target, tau_j, [&](const EvalObject& s, const EvalObject& t) {
    return angle_difference_degrees(s.azimuth, t.azimuth, s.symmetry_order) < tau_theta;
  });
}

std::optional<double> angdiff(const EvalScene& source, const EvalScene& target,
                              double tau_j) {
  double sum = 0.0;
  int count = 0;
  for (const auto& o : source.objects) {
    const Correspondence c = max_iou_correspondence(o, target, IouSpace::k3d);
    if (c.index < 0 || !(c.iou > tau_j)) continue;
    sum += angle_difference_degrees(o.azimuth, target.objects[c.index].azimuth,
                                    o.symmetry_order);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

PrecisionRecall make_precision_recall(double precision, double recall) {
  PrecisionRecall pr{precision, recall, 0.0};
  if (precision + recall > 0.0) pr.f1 = 2.0 * precision * recall / (precision + recall);
  return pr;
}

MeasureReport evaluate(const EvalScene& result, const EvalScene& gt, const Camera& camera,
                       double tau_j, double tau_theta) {
  MeasureReport r;
  r.tau_j = tau_j;
  r.tau_theta = tau_theta;
  r.iou3d = make_precision_recall(iou_measure(result, gt, IouSpace::k3d, camera),
                                  iou_measure(gt, result, IouSpace::k3d, camera));
  r.iou2d = make_precision_recall(iou_measure(result, gt, IouSpace::k2d, camera),
                                  iou_measure(gt, result, IouSpace::k2d, camera));
  r.loc = make_precision_recall(loc_measure(result, gt, tau_j), loc_measure(gt, result, tau_j));
  r.locang = make_precision_recall(locang_measure(result, gt, tau_j, tau_theta),
                                   locang_measure(gt, result, tau_j, tau_theta));
  r.angdiff_degrees = angdiff(gt, result, tau_j);
  return r;
}

std::vector<SweepPoint> threshold_sweep(const EvalScene& result, const EvalScene& gt,
                                        const std::vector<double>& tau_js,
                                        const std::vector<double>& tau_thetas) {
  std::vector<SweepPoint> out;
  out.reserve(tau_js.size() * tau_thetas.size());
  for (double tj : tau_js) {
    for (double tt : tau_thetas) {
      out.push_back({tj, tt,
                     make_precision_recall(locang_measure(result, gt, tj, tt),
                                           locang_measure(gt, result, tj, tt))});
    }
  }
  return out;
}

std::vector<double> default_tau_j_grid() {
  return {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5,
          0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95};
}

std::vector<double> default_tau_theta_grid() {
  return {2.5, 5.0, 7.5, 10.0, 15.0, 20.0, 30.0, 45.0, 60.0, 90.0, 180.0};
}

int occlusion_bin(double value, const std::vector<double>& bin_edges) {
  int bin = 0;
  for (int i = 0; i < static_cast<int>(bin_edges.size()); ++i) {
    if (value >= bin_edges[i]) bin = i;
  }
  return bin;
}

OcclusionReport occlusion_score(const EvalScene& scene, const Camera& camera, int grid,
                                std::vector<double> bin_edges) {
  require(grid >= 8, "occlusion grid must be at least 8 x 8");
  require(!bin_edges.empty() && std::is_sorted(bin_edges.begin(), bin_edges.end()),
          "occlusion bin edges must be non-empty and ascending");
  const int n_obj = static_cast<int>(scene.objects.size());
  std::vector<int> hit(n_obj, 0);
  std::vector<int> nearest(n_obj, 0);
  const double mw = camera.map_size().width;
  const double mh = camera.map_size().height;
  for (int j = 0; j < grid; ++j) {
    for (int i = 0; i < grid; ++i) {
      const Vec2 cell((i + 0.5) * mw / grid, (j + 0.5) * mh / grid);
      const Vec3 dir = camera.ray_direction(cell);
      double best = std::numeric_limits<double>::infinity();
      int best_obj = -1;
      for (int k = 0; k < n_obj; ++k) {
        const auto t = scene.objects[k].box.ray_entry(camera.position(), dir);
        if (!t) continue;
        ++hit[k];
        if (*t < best) {
          best = *t;
          best_obj = k;
        }
      }
      for (const auto& occ : scene.occluders) {
        const auto t = occ.ray_entry(camera.position(), dir);
        if (t && *t < best) {
          best = *t;
          best_obj = -1;
        }
      }
      if (best_obj >= 0) ++nearest[best_obj];
    }
  }
  OcclusionReport report;
  report.bin_edges = std::move(bin_edges);
  report.histogram.assign(report.bin_edges.size(), 0);
  for (int k = 0; k < n_obj; ++k) {
    const double occ = hit[k] == 0 ? 1.0 : 1.0 - static_cast<double>(nearest[k]) / hit[k];
    report.per_object.push_back(occ);
    ++report.histogram[occlusion_bin(occ, report.bin_edges)];
  }
  return report;
}

}  // namespace scenemock
