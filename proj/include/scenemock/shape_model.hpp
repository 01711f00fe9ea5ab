// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "scenemock/geometry.hpp"

namespace scenemock {

inline constexpr int kDefaultKeypointCount = 8;

// Semantic keypoint order of the chair class.
enum ChairKeypoint : int {
  kLegFrontLeft = 0,
  kLegFrontRight = 1,
  kLegBackLeft = 2,
  kLegBackRight = 3,
  kSeatBackLeft = 4,
  kSeatBackRight = 5,
  kBackTopLeft = 6,
  kBackTopRight = 7,
};

/// One database model's keypoints in the canonical pose: centered on the
/// ground-plane origin, front facing -z, resting on y = 0.
struct KeypointSet {
  std::string id;
  Eigen::MatrixX3d keypoints;
};

/// Validates the canonical-pose invariants (all y >= 0, lowest leg tip at 0).
void validate_keypoint_set(const KeypointSet& set, int keypoint_count);

/// PCA deformable template over stacked keypoint coordinates.
class TemplateModel {
 public:
  struct Member {
    KeypointSet set;
    Eigen::VectorXd coords;  // cached PCA coordinates
  };

  /// Builds the model; k is the smallest count whose cumulative explained
  /// variance exceeds `variance_target`.
  static TemplateModel build(std::span<const KeypointSet> database,
                             double variance_target = 0.85);

  /// Reassembles a model from stored parts (deserialization).
  static TemplateModel from_parts(Eigen::VectorXd mean, Eigen::MatrixXd eigenvectors,
                                  Eigen::VectorXd eigenvalues, double variance_fraction,
                                  std::vector<Member> members);

  int keypoint_count() const { return static_cast<int>(mean_.size() / 3); }
  int modes() const { return static_cast<int>(eigenvalues_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  /// Rows are orthonormal eigenvectors, descending eigenvalue order.
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  /// Variance of the discarded modes (for reconstruction bounds).
  const Eigen::VectorXd& discarded_eigenvalues() const { return discarded_; }
  double variance_fraction() const { return variance_fraction_; }
  const std::vector<Member>& members() const { return members_; }

  /// Keypoints of T(deform) = mean + sum_i deform_i * eigenvector_i.
  Eigen::MatrixX3d instantiate(const Eigen::VectorXd& deform) const;

  /// Displacement of keypoint `index` per unit of each mode (3 x k).
  Eigen::Matrix3Xd mode_basis(int index) const;

  /// PCA coordinates of a keypoint set.
  Eigen::VectorXd project(const Eigen::MatrixX3d& keypoints) const;

  /// Id of the member closest to `deform` in PCA space; ties go to the
  /// lexicographically smallest id.
  const std::string& nearest_model(const Eigen::VectorXd& deform) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd eigenvectors_;
  Eigen::VectorXd eigenvalues_;
  Eigen::VectorXd discarded_;
  double variance_fraction_ = 0.0;
  std::vector<Member> members_;
};

Eigen::VectorXd stack_keypoints(const Eigen::MatrixX3d& keypoints);
Eigen::MatrixX3d unstack_keypoints(const Eigen::VectorXd& stacked);

/// Object box from the extents of the deformed template in its local frame,
/// spanning y from the ground to the highest keypoint, then placed in world.
OrientedBox object_box(const TemplateModel& model, const PlacementParams& params);

}  // namespace scenemock
