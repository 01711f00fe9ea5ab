// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "scenemock/geometry.hpp"

namespace scenemock {

inline constexpr double kDefaultPairRadius = 1.5;
inline constexpr double kCovarianceBias = 0.01;
inline constexpr int kDefaultMixtureComponents = 5;
inline constexpr double kLogitEpsilon = 1e-9;

/// Pose of one object in another's local frame.
struct RelativePose {
  Vec2 delta_t = Vec2::Zero();
  double delta_theta = 0.0;

  Eigen::Vector3d vector() const { return {delta_t.x(), delta_t.y(), delta_theta}; }
};

/// Pose of `other` in the frame of `reference`: rotated translation offset
/// and wrapped azimuth difference.
RelativePose relative_pose(const ObjectPose& reference, const ObjectPose& other);

struct GaussianComponent {
  double weight = 1.0;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();  // (dt_x, dt_z, dtheta)
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Identity();
};

/// Mixture over relative poses of object pairs closer than delta_r.
class PairwiseGmm {
 public:
  /// Validates weights (positive, summing to 1 within 1e-9) and that every
  /// covariance is symmetric positive definite.
  PairwiseGmm(std::vector<GaussianComponent> components, double delta_r,
              double diag_bias = kCovarianceBias);

  const std::vector<GaussianComponent>& components() const { return components_; }
  int size() const { return static_cast<int>(components_.size()); }
  double delta_r() const { return delta_r_; }
  double diag_bias() const { return diag_bias_; }

  /// Pose minus component mean, angle wrapped to [-pi, pi).
  Eigen::Vector3d difference(const RelativePose& pose, int component) const;
  /// Lower Cholesky factor inverse: |L^-1 d|^2 = d^T Sigma^-1 d.
  const Eigen::Matrix3d& whitening(int component) const { return whitening_[component]; }
  /// log of the Gaussian normalisation factor eta_k.
  double log_normalizer(int component) const { return log_normalizer_[component]; }

 private:
  std::vector<GaussianComponent> components_;
  std::vector<Eigen::Matrix3d> whitening_;
  std::vector<double> log_normalizer_;
  double delta_r_;
  double diag_bias_;
};

/// Every ordered pair (i, j), i != j, of one scene closer than delta_r yields
/// the pose of j in i's frame.
std::vector<RelativePose> extract_pairs(std::span<const std::vector<ObjectPose>> scenes,
                                        double delta_r = kDefaultPairRadius);

struct GmmFitOptions {
  int max_iterations = 500;
  double tolerance = 1e-7;  // on the mean per-sample objective
  double diag_bias = kCovarianceBias;
  double delta_r = kDefaultPairRadius;
};

struct GmmFitTrace {
  /// Mean per-sample EM objective after each iteration of the final run.
  std::vector<double> objective;
  int restarts = 0;
  int iterations = 0;
};

/// EM with k-means++ initialisation. After each M-step the covariance
/// diagonals receive `diag_bias`; the E-step uses the matching penalised
/// likelihood so the traced objective never decreases.
PairwiseGmm fit_gmm(std::span<const RelativePose> samples, int n_components,
                    std::uint64_t seed, const GmmFitOptions& options = {},
                    GmmFitTrace* trace = nullptr);

double density(const PairwiseGmm& gmm, const RelativePose& pose);

struct MaxMixtureTerm {
  double value = 0.0;
  int component = 0;
};

/// min_k 1/2 (d - mu_k)^T Sigma_k^-1 (d - mu_k) - log(w_k eta_k).
MaxMixtureTerm maxmix_nll(const PairwiseGmm& gmm, const RelativePose& pose);

/// -logit(clamp(p, eps, 1 - eps)).
double clamped_neg_logit(double p);

/// -logit(clamp(density^beta)).
double pair_energy(const PairwiseGmm& gmm, const RelativePose& pose, double beta);

/// Number of density / Max-Mixture evaluations since the last reset.
std::uint64_t gmm_evaluation_count();
void reset_gmm_evaluation_count();

}  // namespace scenemock
