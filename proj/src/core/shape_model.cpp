// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#include "scenemock/shape_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "scenemock/error.hpp"

namespace scenemock {

Eigen::VectorXd stack_keypoints(const Eigen::MatrixX3d& keypoints) {
  Eigen::VectorXd out(keypoints.rows() * 3);
  for (Eigen::Index i = 0; i < keypoints.rows(); ++i) {
    out.segment<3>(3 * i) = keypoints.row(i).transpose();
  }
  return out;
}

Eigen::MatrixX3d unstack_keypoints(const Eigen::VectorXd& stacked) {
  const Eigen::Index n = stacked.size() / 3;
  Eigen::MatrixX3d out(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.row(i) = stacked.segment<3>(3 * i).transpose();
  }
  return out;
}

void validate_keypoint_set(const KeypointSet& set, int keypoint_count) {
  require(set.keypoints.rows() == keypoint_count,
          "keypoint set '" + set.id + "' has the wrong keypoint count");
  require(set.keypoints.allFinite(), "keypoint set '" + set.id + "' is not finite");
  require(set.keypoints.col(1).minCoeff() >= -1e-9,
          "keypoint set '" + set.id + "' dips below the ground plane");
  if (keypoint_count >= 4) {
    const double lowest_leg = set.keypoints.col(1).head(4).minCoeff();
    require(std::abs(lowest_leg) <= 1e-6,
            "keypoint set '" + set.id + "' does not rest on the ground");
  }
}

TemplateModel TemplateModel::build(std::span<const KeypointSet> database,
                                   double variance_target) {
  require(database.size() >= 2, "template database needs at least two sets");
  const auto rows = database.front().keypoints.rows();
  require(rows > 0, "template database sets have no keypoints");
  for (const auto& set : database) validate_keypoint_set(set, static_cast<int>(rows));

  const auto n = static_cast<Eigen::Index>(database.size());
  Eigen::MatrixXd data(n, rows * 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.row(i) = stack_keypoints(database[i].keypoints).transpose();
  }
  const Eigen::VectorXd mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - mean.transpose();
  const Eigen::MatrixXd covariance =
      (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::kNumeric, "template covariance eigendecomposition failed");
  }
  // Eigen returns ascending order.
  const Eigen::VectorXd values = solver.eigenvalues().reverse().cwiseMax(0.0);
  const Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
  const double total = values.sum();
  if (!(total > 1e-14)) {
    fail(ErrorCode::kDegenerateDatabase, "template database has zero variance");
  }

  Eigen::Index k = 1;
  double cumulative = values(0);
  while (cumulative / total <= variance_target && k < values.size()) {
    cumulative += values(k);
    ++k;
  }

  Eigen::MatrixXd basis = vectors.leftCols(k).transpose();
  for (Eigen::Index i = 0; i < k; ++i) {
    Eigen::Index arg = 0;
    basis.row(i).cwiseAbs().maxCoeff(&arg);
    if (basis(i, arg) < 0.0) basis.row(i) *= -1.0;
  }

  TemplateModel model;
  model.mean_ = mean;
  model.eigenvectors_ = std::move(basis);
  model.eigenvalues_ = values.head(k);
  model.discarded_ = values.tail(values.size() - k);
  model.variance_fraction_ = cumulative / total;
  model.members_.reserve(database.size());
  for (const auto& set : database) {
    Member member{set, Eigen::VectorXd()};
    member.coords = model.project(set.keypoints);
    model.members_.push_back(std::move(member));
  }
  return model;
}

TemplateModel TemplateModel::from_parts(Eigen::VectorXd mean, Eigen::MatrixXd eigenvectors,
                                        Eigen::VectorXd eigenvalues,
                                        double variance_fraction,
                                        std::vector<Member> members) {
  require(mean.size() > 0 && mean.size() % 3 == 0, "template mean has invalid length");
  require(eigenvectors.rows() == eigenvalues.size() && eigenvalues.size() >= 1,
          "template eigenvector count does not match eigenvalues");
  require(eigenvectors.cols() == mean.size(), "template eigenvector length mismatch");
  for (const auto& m : members) {
    require(m.coords.size() == eigenvalues.size(),
            "template member '" + m.set.id + "' has wrong coordinate count");
  }
  TemplateModel model;
  model.mean_ = std::move(mean);
  model.eigenvectors_ = std::move(eigenvectors);
  model.eigenvalues_ = std::move(eigenvalues);
  model.discarded_ = Eigen::VectorXd();
  model.variance_fraction_ = variance_fraction;
  model.members_ = std::move(members);
  return model;
}

Eigen::MatrixX3d TemplateModel::instantiate(const Eigen::VectorXd& deform) const {
  require(deform.size() == modes(), "deform length must equal the template mode count");
  return unstack_keypoints(mean_ + eigenvectors_.transpose() * deform);
}

Eigen::Matrix3Xd TemplateModel::mode_basis(int index) const {
  return eigenvectors_.middleCols(3 * index, 3).transpose();
}

Eigen::VectorXd TemplateModel::project(const Eigen::MatrixX3d& keypoints) const {
  require(keypoints.rows() == keypoint_count(), "keypoint count mismatch");
  return eigenvectors_ * (stack_keypoints(keypoints) - mean_);
}

const std::string& TemplateModel::nearest_model(const Eigen::VectorXd& deform) const {
  require(!members_.empty(), "template database is empty");
  require(deform.size() == modes(), "deform length must equal the template mode count");
  const Member* best = nullptr;
  double best_distance = std::numeric_limits<double>::infinity();
  for (const auto& member : members_) {
    const double d = (member.coords - deform).squaredNorm();
    if (best == nullptr || d < best_distance ||
        (d == best_distance && member.set.id < best->set.id)) {
      best = &member;
      best_distance = d;
    }
  }
  return best->set.id;
}

OrientedBox object_box(const TemplateModel& model, const PlacementParams& params) {
  const Eigen::MatrixX3d local = model.instantiate(params.deform);
  const double x_min = local.col(0).minCoeff();
  const double x_max = local.col(0).maxCoeff();
  const double z_min = local.col(2).minCoeff();
  const double z_max = local.col(2).maxCoeff();
  const double y_max = std::max(local.col(1).maxCoeff(), 1e-3);
  constexpr double kMinHalf = 1e-3;

  const Vec3 local_center(0.5 * (x_min + x_max), 0.5 * y_max, 0.5 * (z_min + z_max));
  OrientedBox box;
  box.center = rotation_about_up(params.azimuth) * (params.scale * local_center);
  box.center.x() += params.translation.x();
  box.center.z() += params.translation.y();
  box.half_extents = Vec3(std::max(0.5 * (x_max - x_min), kMinHalf),
                          std::max(0.5 * y_max, kMinHalf),
                          std::max(0.5 * (z_max - z_min), kMinHalf)) *
                     params.scale;
  box.azimuth = params.azimuth;
  return box;
}

}  // namespace scenemock
