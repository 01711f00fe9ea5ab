// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#include "scenemock/fitting.hpp"

#include <cmath>
#include <limits>

#include "scenemock/error.hpp"

namespace scenemock {

namespace {

constexpr double kMinScale = 1e-3;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

FitResult rejected_result(const PlacementParams& params) {
  FitResult r;
  r.params = params;
  r.residual = std::numeric_limits<double>::infinity();
  r.data_term = r.residual;
  r.converged = false;
  return r;
}

}  // namespace

std::vector<AnchorPair> propose_pairs(const KeypointLocations& locations) {
  std::vector<AnchorPair> pairs;
  const auto& types = locations.types;
  for (std::size_t i = 0; i < types.size(); ++i) {
    for (std::size_t j = i + 1; j < types.size(); ++j) {
      for (const auto& a : types[i]) {
        for (const auto& b : types[j]) {
          pairs.push_back({AnchorObservation{static_cast<int>(i), a.position},
                           AnchorObservation{static_cast<int>(j), b.position}});
        }
      }
    }
  }
  return pairs;
}

FitObjective::FitObjective(const FitProblem& problem)
    : problem_(problem), model_(problem.model) {
  require(problem.camera != nullptr && problem.model != nullptr,
          "fit problem needs a camera and a template");
  require(problem.alpha_scale >= 0.0 && problem.alpha_deform >= 0.0,
          "regulariser weights must be non-negative");
  if (problem.stage == FitStage::kPairInit) {
    require(problem.anchors.has_value(), "pair fit needs an anchor pair");
    const auto& a = *problem.anchors;
    require(a[0].type != a[1].type, "anchor pair needs two distinct keypoint types");
    for (const auto& obs : a) {
      require(obs.type >= 0 && obs.type < model_->keypoint_count(),
              "anchor keypoint type out of range");
    }
  } else {
    require(problem.maps != nullptr, "map refinement needs keypoint maps");
    require(problem.maps->channels() == model_->keypoint_count(),
            "map channel count must equal the template keypoint count");
  }
  if (problem.prior) {
    require(problem.prior->gmm != nullptr, "fit prior needs a mixture model");
  }
}

Eigen::VectorXd FitObjective::pack(const PlacementParams& params) const {
  Eigen::VectorXd x(parameter_count());
  x << params.translation.x(), params.translation.y(), params.azimuth, params.scale,
      params.deform.size() == model_->modes() ? params.deform
                                              : Eigen::VectorXd::Zero(model_->modes());
  return x;
}

PlacementParams FitObjective::unpack(const Eigen::VectorXd& x) const {
  PlacementParams p;
  p.translation = Vec2(x(0), x(1));
  p.azimuth = x(2);
  p.scale = x(3);
  p.deform = x.tail(model_->modes());
  return p;
}

int FitObjective::data_residual_count() const {
  return problem_.stage == FitStage::kPairInit ? 4 : model_->keypoint_count();
}

void FitObjective::select_prior_components(const Eigen::VectorXd& x) {
  active_.clear();
  if (!problem_.prior) return;
  const PairwiseGmm& gmm = *problem_.prior->gmm;
  const ObjectPose pose{Vec2(x(0), x(1)), x(2)};
  for (const auto& fixed : problem_.prior->fixed) {
    if ((pose.translation - fixed.translation).norm() > gmm.delta_r()) continue;
    const auto term = maxmix_nll(gmm, relative_pose(fixed, pose));
    active_.push_back({fixed, term.component});
  }
}

bool FitObjective::residuals(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
  const int k = model_->modes();
  const int data = data_residual_count();
  r.resize(data + 1 + k + 3 * static_cast<int>(active_.size()));
  if (!x.allFinite() || x(3) <= kMinScale) return false;

  const PlacementParams params = unpack(x);
  const Eigen::MatrixX3d local = model_->instantiate(params.deform);
  const Mat3 rot = rotation_about_up(params.azimuth);
  const Vec3 shift(params.translation.x(), 0.0, params.translation.y());
  try {
    if (problem_.stage == FitStage::kPairInit) {
      for (int a = 0; a < 2; ++a) {
        const auto& obs = (*problem_.anchors)[a];
        const Vec3 world = rot * (params.scale * local.row(obs.type).transpose()) + shift;
        r.segment<2>(2 * a) = problem_.camera->project(world) - obs.position;
      }
    } else {
      for (int i = 0; i < data; ++i) {
        const Vec3 world = rot * (params.scale * local.row(i).transpose()) + shift;
        const Vec2 z = problem_.camera->project(world);
        r(i) = 1.0 - sample(*problem_.maps, i, z);
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBehindCamera) return false;
    throw;
  }
  r(data) = std::sqrt(problem_.alpha_scale) * (params.scale - 1.0);
  r.segment(data + 1, k) = std::sqrt(problem_.alpha_deform) * params.deform;

  int row = data + 1 + k;
  for (const auto& term : active_) {
    const PairwiseGmm& gmm = *problem_.prior->gmm;
    const auto rel = relative_pose(term.fixed, params.pose());
    r.segment<3>(row) = kInvSqrt2 * (gmm.whitening(term.component) *
                                     gmm.difference(rel, term.component));
    row += 3;
  }
  return true;
}

void FitObjective::jacobian(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
  const int k = model_->modes();
  const int n_params = parameter_count();
  const int data = data_residual_count();
  jac.setZero(data + 1 + k + 3 * static_cast<int>(active_.size()), n_params);

  const PlacementParams params = unpack(x);
  const Eigen::MatrixX3d local = model_->instantiate(params.deform);
  const Mat3 rot = rotation_about_up(params.azimuth);
  const Mat3 d_rot = rotation_about_up_derivative(params.azimuth);
  const Vec3 shift(params.translation.x(), 0.0, params.translation.y());

  // d(world point of keypoint i)/d(params), 3 x n_params.
  auto world_jacobian = [&](int i) {
    Eigen::Matrix3Xd d(3, n_params);
    d.setZero();
    const Vec3 kp = local.row(i).transpose();
    d(0, 0) = 1.0;
    d(2, 1) = 1.0;
    d.col(2) = d_rot * (params.scale * kp);
    d.col(3) = rot * kp;
    d.rightCols(k) = params.scale * rot * model_->mode_basis(i);
    return d;
  };

  if (problem_.stage == FitStage::kPairInit) {
    for (int a = 0; a < 2; ++a) {
      const int i = (*problem_.anchors)[a].type;
      const Vec3 world = rot * (params.scale * local.row(i).transpose()) + shift;
      Eigen::Matrix<double, 2, 3> dproj;
      problem_.camera->project(world, &dproj);
      jac.block(2 * a, 0, 2, n_params) = dproj * world_jacobian(i);
    }
  } else {
    for (int i = 0; i < data; ++i) {
      const Vec3 world = rot * (params.scale * local.row(i).transpose()) + shift;
      Eigen::Matrix<double, 2, 3> dproj;
      const Vec2 z = problem_.camera->project(world, &dproj);
      Vec2 grad;
      sample(*problem_.maps, i, z, &grad);
      jac.row(i) = -(grad.transpose() * dproj * world_jacobian(i));
    }
  }
  jac(data, 3) = std::sqrt(problem_.alpha_scale);
  for (int j = 0; j < k; ++j) jac(data + 1 + j, 4 + j) = std::sqrt(problem_.alpha_deform);

  int row = data + 1 + k;
  for (const auto& term : active_) {
    const PairwiseGmm& gmm = *problem_.prior->gmm;
    const double c = std::cos(term.fixed.azimuth);
    const double s = std::sin(term.fixed.azimuth);
    Eigen::Matrix3d d_delta = Eigen::Matrix3d::Zero();
    // delta_t = rotate_ground(-fixed azimuth, t - t_fixed); delta_theta = theta - ...
    d_delta(0, 0) = c;
    d_delta(0, 1) = -s;
    d_delta(1, 0) = s;
    d_delta(1, 1) = c;
    d_delta(2, 2) = 1.0;
    jac.block(row, 0, 3, 3) = kInvSqrt2 * gmm.whitening(term.component) * d_delta;
    row += 3;
  }
}

LeastSquaresProblem FitObjective::as_problem() {
  LeastSquaresProblem p;
  p.residuals = [this](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    return residuals(x, r);
  };
  p.jacobian = [this](const Eigen::VectorXd& x, Eigen::MatrixXd& j) { jacobian(x, j); };
  if (problem_.prior) {
    p.refresh = [this](const Eigen::VectorXd& x) { select_prior_components(x); };
  }
  return p;
}

namespace {

FitResult finish(const FitProblem& problem, FitObjective& objective, const LmResult& lm) {
  FitResult out;
  out.params = objective.unpack(lm.x);
  out.params.azimuth = wrap_angle(out.params.azimuth);
  out.converged = lm.converged;
  out.iterations = lm.iterations;

  Eigen::VectorXd r;
  if (!objective.residuals(lm.x, r)) return rejected_result(out.params);
  const int k = problem.model->modes();
  const int data = problem.stage == FitStage::kPairInit ? 4 : problem.model->keypoint_count();
  out.data_term = r.head(data).squaredNorm();
  out.regularizer = r.segment(data, 1 + k).squaredNorm();
  out.prior_quadratic = r.tail(r.size() - data - 1 - k).squaredNorm();
  out.residual = out.data_term + out.regularizer + out.prior_quadratic;
  if (problem.prior) {
    const PairwiseGmm& gmm = *problem.prior->gmm;
    for (const auto& fixed : problem.prior->fixed) {
      if ((out.params.translation - fixed.translation).norm() > gmm.delta_r()) continue;
      out.prior_nll += maxmix_nll(gmm, relative_pose(fixed, out.params.pose())).value;
      ++out.prior_terms;
    }
  }
  return out;
}

FitResult run(const FitProblem& problem, const PlacementParams& init) {
  FitObjective objective(problem);
  const Eigen::VectorXd x0 = objective.pack(init);
  objective.select_prior_components(x0);
  try {
    const LmResult lm = lm_minimize(objective.as_problem(), x0, problem.lm);
    return finish(problem, objective, lm);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNumeric || e.code() == ErrorCode::kBehindCamera) {
      return rejected_result(init);
    }
    throw;
  }
}

}  // namespace

FitResult fit_initial(const FitProblem& problem) {
  require(problem.stage == FitStage::kPairInit, "fit_initial needs the pair stage");
  require(problem.anchors.has_value(), "fit_initial needs an anchor pair");
  // validate anchors before any early exit on a missed back-projection
  { FitObjective check(problem); }
  const TemplateModel& model = *problem.model;
  const AnchorObservation& first = (*problem.anchors)[0];
  const Eigen::MatrixX3d mean_shape = model.instantiate(Eigen::VectorXd::Zero(model.modes()));
  const Vec3 anchor_kp = mean_shape.row(first.type).transpose();

  auto hit = problem.camera->intersect_horizontal(first.position, anchor_kp.y());
  if (!hit) hit = problem.camera->intersect_horizontal(first.position, 0.0);
  PlacementParams init;
  init.deform = Eigen::VectorXd::Zero(model.modes());
  if (!hit) return rejected_result(init);

  FitResult best = rejected_result(init);
  constexpr int kSeeds = 8;
  for (int s = 0; s < kSeeds; ++s) {
    init.azimuth = s * (2.0 * kPi / kSeeds);
    init.scale = 1.0;
    init.translation =
        Vec2(hit->x(), hit->z()) - rotate_ground(init.azimuth, Vec2(anchor_kp.x(), anchor_kp.z()));
    FitResult r = run(problem, init);
    if (!r.rejected() && (best.rejected() || r.residual < best.residual)) best = std::move(r);
  }
  return best;
}

FitResult fit_refine(const FitProblem& problem, const PlacementParams& init) {
  require(problem.stage == FitStage::kMapRefine, "fit_refine needs the map stage");
  return run(problem, init);
}

}  // namespace scenemock
