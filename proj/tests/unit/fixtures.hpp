// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

// Shared models and checks for the fitting-related tests.

#pragma once

#include <cmath>
#include <random>

#include <Eigen/Cholesky>

#include "oracles.hpp"
#include "scenemock/fitting.hpp"
#include "scenemock/harness.hpp"
#include "scenemock/keypoint_maps.hpp"
#include "scenemock/scene_stats.hpp"
#include "scenemock/shape_model.hpp"

namespace fixture {

using namespace scenemock;

inline const TemplateModel& chair_template() {
  static const TemplateModel model = TemplateModel::build(generate_chair_database(40, 1));
  return model;
}

inline PlacementParams placement(double x, double z, double azimuth, double scale = 1.0) {
  PlacementParams p;
  p.translation = Vec2(x, z);
  p.azimuth = azimuth;
  p.scale = scale;
  p.deform = Eigen::VectorXd::Zero(chair_template().modes());
  return p;
}

/// Map positions of the placed template keypoints.
inline std::vector<Vec2> project_placement(const Camera& camera, const PlacementParams& p) {
  const Eigen::MatrixX3d world = place_keypoints(chair_template().instantiate(p.deform), p);
  std::vector<Vec2> out;
  for (int i = 0; i < world.rows(); ++i) out.push_back(camera.project(world.row(i).transpose()));
  return out;
}

inline KeypointMapStack render_placements(const Camera& camera,
                                          const std::vector<PlacementParams>& objects) {
  const int n = chair_template().keypoint_count();
  KeypointPositions by_type(n);
  for (const auto& p : objects) {
    const auto proj = project_placement(camera, p);
    for (int i = 0; i < n; ++i) by_type[i].push_back(proj[i]);
  }
  const ImageSize map = camera.map_size();
  return render_maps(by_type, default_sigma(map.width), map.width, map.height);
}

/// Distance (in cells) from a map position to the nearest bilinear kink line
/// or to the grid border region.
inline double kink_margin(const KeypointMapStack& maps, const Vec2& z) {
  auto frac = [](double v) {
    const double f = v - 0.5 - std::floor(v - 0.5);
    return std::min(f, 1.0 - f);
  };
  double m = std::min(frac(z.x()), frac(z.y()));
  m = std::min({m, z.x() - 1.0, z.y() - 1.0, maps.width() - 1.0 - z.x(), maps.height() - 1.0 - z.y()});
  return m;
}

/// Relative Frobenius gap between analytic and central-difference Jacobians.
inline double jacobian_gap(FitObjective& objective, const Eigen::VectorXd& x) {
  objective.select_prior_components(x);
  Eigen::MatrixXd analytic;
  objective.jacobian(x, analytic);
  const Eigen::MatrixXd fd = oracle::fd_jacobian(
      [&](const Eigen::VectorXd& y) {
        Eigen::VectorXd r;
        objective.residuals(y, r);
        return r;
      },
      x, 1e-6);
  return (analytic - fd).norm() / std::max(1.0, fd.norm());
}

/// Two-component mixture used by the prior tests.
inline PairwiseGmm row_mixture() {
  GaussianComponent a, b;
  a.weight = 0.5;
  a.mean = Eigen::Vector3d(0.8, 0.0, 0.0);
  a.covariance = Eigen::Vector3d(0.02, 0.03, 0.05).asDiagonal();
  b.weight = 0.5;
  b.mean = Eigen::Vector3d(-0.8, 0.0, 0.0);
  b.covariance = Eigen::Vector3d(0.02, 0.03, 0.05).asDiagonal();
  return PairwiseGmm({a, b}, kDefaultPairRadius);
}

}  // namespace fixture

namespace fixture {

struct Planted {
  double weight;
  Eigen::Vector3d mean;
  Eigen::Matrix3d covariance;
};

/// Samples from a planted mixture via Cholesky factors.
inline std::vector<RelativePose> planted_samples(const std::vector<Planted>& parts, int n,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::Matrix3d> chol;
  for (const auto& p : parts) chol.push_back(p.covariance.llt().matrixL());
  std::vector<RelativePose> out;
  for (int i = 0; i < n; ++i) {
    double pick = u(rng);
    std::size_t c = 0;
    while (c + 1 < parts.size() && pick > parts[c].weight) pick -= parts[c++].weight;
    const Eigen::Vector3d v = parts[c].mean + chol[c] * Eigen::Vector3d(g(rng), g(rng), g(rng));
    out.push_back({Vec2(v.x(), v.y()), wrap_angle(v.z())});
  }
  return out;
}

inline std::vector<Planted> two_planted_components() {
  Eigen::Matrix3d cov = Eigen::Matrix3d::Identity() * 0.01;
  return {{0.4, Eigen::Vector3d(0.0, 0.0, 0.0), cov}, {0.6, Eigen::Vector3d(2.0, 0.0, 0.0), cov}};
}

/// Matches recovered components to planted ones by nearest mean and returns
/// the largest mean gap, weight gap and relative Frobenius covariance gap.
struct RecoveryError {
  double mean = 0.0;
  double weight = 0.0;
  double covariance = 0.0;
};

inline RecoveryError recovery_error(const PairwiseGmm& gmm, const std::vector<Planted>& parts) {
  RecoveryError e;
  for (const auto& p : parts) {
    int best = 0;
    for (int c = 1; c < gmm.size(); ++c)
      if ((gmm.components()[c].mean - p.mean).norm() < (gmm.components()[best].mean - p.mean).norm())
        best = c;
    const auto& c = gmm.components()[best];
    const Eigen::Matrix3d target = p.covariance + gmm.diag_bias() * Eigen::Matrix3d::Identity();
    e.mean = std::max(e.mean, (c.mean - p.mean).cwiseAbs().maxCoeff());
    e.weight = std::max(e.weight, std::abs(c.weight - p.weight));
    e.covariance = std::max(e.covariance, (c.covariance - target).norm() / target.norm());
  }
  return e;
}

/// Checks p_Max <= p_GMM <= N_m p_Max at random poses; returns violations.
inline int sandwich_violations(const PairwiseGmm& gmm, int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(-1.0, 3.0), ua(-kPi, kPi);
  int bad = 0;
  for (int i = 0; i < points; ++i) {
    const RelativePose pose{Vec2(ut(rng), ut(rng) - 1.0), ua(rng)};
    const double p_max = std::exp(-maxmix_nll(gmm, pose).value);
    const double p = density(gmm, pose);
    const double tol = 1e-12 * std::max(p, 1e-300);
    if (p_max > p + tol || p > gmm.size() * p_max + tol) ++bad;
  }
  return bad;
}

}  // namespace fixture
