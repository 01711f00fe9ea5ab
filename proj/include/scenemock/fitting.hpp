// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "scenemock/geometry.hpp"
#include "scenemock/keypoint_maps.hpp"
#include "scenemock/lm.hpp"
#include "scenemock/scene_stats.hpp"
#include "scenemock/shape_model.hpp"

namespace scenemock {

struct AnchorObservation {
  int type = 0;
  Vec2 position = Vec2::Zero();
};

using AnchorPair = std::array<AnchorObservation, 2>;

/// All pairs of detected keypoints of distinct types, ordered by type index
/// and then by detection order.
std::vector<AnchorPair> propose_pairs(const KeypointLocations& locations);

/// Already-selected objects and the co-occurrence model that ties a new
/// candidate to them.
struct FitPrior {
  std::vector<ObjectPose> fixed;
  const PairwiseGmm* gmm = nullptr;
};

enum class FitStage { kPairInit, kMapRefine };

struct FitProblem {
  const Camera* camera = nullptr;
  const TemplateModel* model = nullptr;
  FitStage stage = FitStage::kPairInit;
  std::optional<AnchorPair> anchors;
  const KeypointMapStack* maps = nullptr;
  double alpha_scale = 1.0;
  double alpha_deform = 1.0;
  std::optional<FitPrior> prior;
  LmOptions lm;
};

struct FitResult {
  PlacementParams params;
  /// Plain-sum objective: data term + regulariser + Max-Mixture quadratics.
  double residual = 0.0;
  double data_term = 0.0;
  double regularizer = 0.0;
  double prior_quadratic = 0.0;
  /// Full Max-Mixture NLL summed over fixed objects within delta_r.
  double prior_nll = 0.0;
  int prior_terms = 0;
  bool converged = false;
  int iterations = 0;

  /// Candidate cost compared against tau_u: the objective with the
  /// Max-Mixture terms taken as full NLLs, averaged over the keypoints.
  double acceptance_score(int keypoint_count) const {
    return (data_term + regularizer + prior_nll) / keypoint_count;
  }
  bool rejected() const { return !std::isfinite(residual); }
};

/// Residuals and analytic Jacobian of one fitting stage over the packed
/// parameters [t_x, t_z, azimuth, scale, deform...].
class FitObjective {
 public:
  explicit FitObjective(const FitProblem& problem);

  int parameter_count() const { return 4 + model_->modes(); }
  Eigen::VectorXd pack(const PlacementParams& params) const;
  PlacementParams unpack(const Eigen::VectorXd& x) const;

  bool residuals(const Eigen::VectorXd& x, Eigen::VectorXd& r) const;
  void jacobian(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const;

  /// Re-selects the fixed objects within delta_r and each one's closest
  /// mixture component k* at x.
  void select_prior_components(const Eigen::VectorXd& x);

  int active_prior_terms() const { return static_cast<int>(active_.size()); }
  LeastSquaresProblem as_problem();

 private:
  struct ActiveTerm {
    ObjectPose fixed;
    int component = 0;
  };

  int data_residual_count() const;

  const FitProblem& problem_;
  const TemplateModel* model_;
  std::vector<ActiveTerm> active_;
};

/// Pair-anchored fit: 2D reprojection gaps of the two anchors plus the
/// scale / deformation regulariser, seeded from eight azimuths.
FitResult fit_initial(const FitProblem& problem);

/// Map-space refinement over all keypoints, with Max-Mixture terms for
/// fixed objects when a prior is present.
FitResult fit_refine(const FitProblem& problem, const PlacementParams& init);

}  // namespace scenemock
