// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "scenemock/geometry.hpp"

namespace scenemock {

inline constexpr double kDefaultTauJ = 0.25;
inline constexpr double kDefaultTauTheta = 15.0;  // degrees

struct EvalObject {
  OrientedBox box;
  double azimuth = 0.0;
  int symmetry_order = 1;
};

struct EvalScene {
  std::vector<EvalObject> objects;
  /// Non-scored boxes (tables) that still block view rays.
  std::vector<OrientedBox> occluders;
};

enum class IouSpace { k3d, k2d };

struct Correspondence {
  int index = -1;  // -1 when the target is empty
  double iou = 0.0;
};

/// Axis-aligned image rectangle around the projected box corners, in map
/// coordinates. Corners behind the camera are ignored.
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  double area() const { return x1 > x0 && y1 > y0 ? (x1 - x0) * (y1 - y0) : 0.0; }
};
Rect projected_rect(const OrientedBox& box, const Camera& camera);
double rect_iou(const Rect& a, const Rect& b);

/// Best-IoU target for `object`; ties go to the first index. `camera` is
/// only needed for k2d.
Correspondence max_iou_correspondence(const EvalObject& object, const EvalScene& target,
                                      IouSpace space, const Camera* camera = nullptr);

/// Absolute azimuth gap in degrees, wrapped to [0, 180] and folded by the
/// rotational symmetry order.
double angle_difference_degrees(double a, double b, int symmetry_order = 1);

/// Mean MaxIoU over source objects; 0 for an empty source.
double iou_measure(const EvalScene& source, const EvalScene& target, IouSpace space,
                   const Camera& camera);
/// Fraction of source objects whose 3D correspondence exceeds tau_j.
double loc_measure(const EvalScene& source, const EvalScene& target, double tau_j);
/// As loc_measure, additionally requiring an angle gap below tau_theta degrees.
double locang_measure(const EvalScene& source, const EvalScene& target, double tau_j,
                      double tau_theta);
/// Mean angle gap in degrees over correctly located source objects; empty if
/// none is located.
std::optional<double> angdiff(const EvalScene& source, const EvalScene& target, double tau_j);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};
PrecisionRecall make_precision_recall(double precision, double recall);

struct MeasureReport {
  PrecisionRecall iou3d, iou2d, loc, locang;
  std::optional<double> angdiff_degrees;
  double tau_j = kDefaultTauJ;
  double tau_theta = kDefaultTauTheta;
};

/// Precision compares result against ground truth, recall the reverse.
MeasureReport evaluate(const EvalScene& result, const EvalScene& gt, const Camera& camera,
                       double tau_j = kDefaultTauJ, double tau_theta = kDefaultTauTheta);

struct SweepPoint {
  double tau_j = 0.0;
  double tau_theta = 0.0;
  PrecisionRecall locang;
};
std::vector<SweepPoint> threshold_sweep(const EvalScene& result, const EvalScene& gt,
                                        const std::vector<double>& tau_js,
                                        const std::vector<double>& tau_thetas);
std::vector<double> default_tau_j_grid();
std::vector<double> default_tau_theta_grid();

struct OcclusionReport {
  std::vector<double> per_object;  // 1 - visible fraction, by object index
  std::vector<double> bin_edges;   // lower edges, ascending
  std::vector<int> histogram;      // objects per bin
};

/// Casts one ray through each cell of an n x n grid over the image plane;
/// an object's visibility is the share of rays hitting it where it is the
/// nearest box. Objects hit by no ray are fully occluded.
OcclusionReport occlusion_score(const EvalScene& scene, const Camera& camera, int grid,
                                std::vector<double> bin_edges = {0.0, 0.25, 0.5, 0.75});

/// Bin index of a value given ascending lower edges.
int occlusion_bin(double value, const std::vector<double>& bin_edges);

}  // namespace scenemock
