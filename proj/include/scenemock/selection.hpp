// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "scenemock/fitting.hpp"
#include "scenemock/geometry.hpp"
#include "scenemock/keypoint_maps.hpp"
#include "scenemock/scene_stats.hpp"
#include "scenemock/shape_model.hpp"

namespace scenemock {

/// A placement that survived fitting, with its cached selection data.
struct Candidate {
  PlacementParams params;
  double fit_score = 0.0;         // acceptance score compared with tau_u
  std::vector<Vec2> projected;    // map positions of the keypoints, by type
  OrientedBox box;
  double unary = 0.0;             // U_i before any fixed-object term

  ObjectPose pose() const { return params.pose(); }
};

/// Builds the geometric parts of a candidate. Throws kBehindCamera if a
/// keypoint projects behind the camera.
Candidate make_candidate(const TemplateModel& model, const Camera& camera,
                         const PlacementParams& params, double fit_score = 0.0);

/// Agreement ratio |n . m|_F / |n . n|_F between the lobes rendered at the
/// candidate keypoints (n) and the observed maps (m). Throws kZeroSupport if
/// n vanishes on the grid.
double unary_score(std::span<const Vec2> projected, const KeypointMapStack& maps);

/// -logit(clamp(score^alpha)).
double unary_energy(std::span<const Vec2> projected, const KeypointMapStack& maps,
                    double alpha);

/// Density used for pairwise terms; empty disables them.
using PairDensity = std::function<double(const RelativePose&)>;

/// Binary labelling problem over the free candidates.
struct SelectionProblem {
  std::vector<double> unary;
  /// Dense symmetric matrix of co-selection energies (0 where absent).
  Eigen::MatrixXd pairwise;
  /// Dense symmetric matrix, true where a pair may not be co-selected.
  std::vector<std::vector<char>> forbidden;
  /// Input candidate index of each variable.
  std::vector<int> candidate_index;

  int size() const { return static_cast<int>(unary.size()); }
  bool is_forbidden(int i, int j) const { return forbidden[i][j] != 0; }
  /// Energy of a labelling given as sorted variable indices; +inf if the set
  /// contains a forbidden pair.
  double energy(std::span<const int> selected) const;
};

struct BuildOptions {
  double beta = 0.14;
  double delta_r = kDefaultPairRadius;
  double shrink = 0.9;
};

/// Pairwise terms for candidates within delta_r, forbidden pairs from box
/// overlap, and, for each fixed object within delta_r, the extra unary
/// -logit(clamp(density^beta)). Candidates overlapping a fixed object are
/// left out of the variable set.
SelectionProblem build_problem(std::span<const Candidate> candidates,
                               std::span<const Candidate> fixed, const PairDensity& density,
                               const BuildOptions& options = {});

/// Exact branch and bound up to this many variables, greedy + local search
/// beyond.
inline constexpr int kExactSolverLimit = 20;

/// Minimum-energy labelling as sorted variable indices. Never contains a
/// forbidden pair; its energy is never above the empty labelling's.
std::vector<int> solve(const SelectionProblem& problem);

std::vector<int> solve_exact(const SelectionProblem& problem);
std::vector<int> solve_greedy(const SelectionProblem& problem);

struct InferenceOptions {
  double tau_m = 0.25;
  double tau_u = 0.21;
  double alpha = 0.61;
  double beta = 0.14;
  int max_iterations = 4;
  bool use_pairwise = true;
  double alpha_scale = 1.0;
  double alpha_deform = 1.0;
  double dedupe_iou = 0.7;
  double dedupe_azimuth = 15.0 * kPi / 180.0;
  double shrink = 0.9;
  /// Fits with any |deform_i| above this many mode standard deviations are
  /// not accepted; <= 0 disables the check.
  double max_deform_sigma = 3.0;
};

/// True when every deformation coefficient lies within `max_sigma` standard
/// deviations of its mode (always true for max_sigma <= 0).
bool plausible_shape(const TemplateModel& model, const Eigen::VectorXd& deform,
                     double max_sigma);

/// Merges near duplicates (IoU3D above `iou` and azimuth gap below `azimuth`)
/// keeping the lower fit score; returns survivors in score order.
std::vector<Candidate> dedupe(std::vector<Candidate> candidates, double iou, double azimuth);

struct InferredObject {
  PlacementParams params;
  std::string model_id;
  OrientedBox box;
  int iteration = 0;
};

struct IterationStats {
  int refined = 0;
  int accepted = 0;
  int candidates = 0;
  int selected = 0;
};

struct InferredScene {
  std::vector<InferredObject> objects;
  int iterations_used = 0;
  std::vector<IterationStats> iterations;
};

/// Full loop: extract keypoints, fit pair proposals, refine, select, and
/// repeat with the selected objects fixed until nothing new is selected or
/// max_iterations is reached. `gmm` may be null only when use_pairwise is
/// false.
InferredScene infer_scene(const KeypointMapStack& maps, const Camera& camera,
                          const TemplateModel& model, const PairwiseGmm* gmm,
                          const InferenceOptions& options = {});

}  // namespace scenemock
