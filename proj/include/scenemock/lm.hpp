// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace scenemock {

/// A nonlinear least-squares problem min 1/2 |r(x)|^2.
struct LeastSquaresProblem {
  /// Fills `r`; returns false when r is undefined at x (e.g. a point behind
  /// the camera). Such trial steps are rejected.
  std::function<bool(const Eigen::VectorXd& x, Eigen::VectorXd& r)> residuals;
  std::function<void(const Eigen::VectorXd& x, Eigen::MatrixXd& jacobian)> jacobian;
  /// Optional hook run at the start of every outer iteration, before the
  /// residual at the current point is re-evaluated.
  std::function<void(const Eigen::VectorXd& x)> refresh;
};

struct LmOptions {
  int max_iterations = 100;
  double initial_damping = 1e-3;
  double step_tolerance = 1e-8;
  double gradient_tolerance = 1e-10;
  double max_damping = 1e16;
};

struct LmResult {
  Eigen::VectorXd x;
  double objective = 0.0;  // 1/2 |r|^2 at x
  bool converged = false;
  int iterations = 0;
  std::vector<double> accepted_objectives;
};

/// Levenberg-Marquardt with damping multiplied by 10 on a rejected step and
/// divided by 10 on an accepted one. Throws kNumeric if r(x0) is undefined.
LmResult lm_minimize(const LeastSquaresProblem& problem, Eigen::VectorXd x0,
                     const LmOptions& options = {});

}  // namespace scenemock
