// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#include "scenemock/lm.hpp"

#include <Eigen/Cholesky>

#include "scenemock/error.hpp"

namespace scenemock {

namespace {

bool evaluate(const LeastSquaresProblem& problem, const Eigen::VectorXd& x,
              Eigen::VectorXd& r, double& cost) {
  if (!problem.residuals(x, r) || !r.allFinite()) return false;
  cost = 0.5 * r.squaredNorm();
  return true;
}

}  // namespace

LmResult lm_minimize(const LeastSquaresProblem& problem, Eigen::VectorXd x0,
                     const LmOptions& options) {
  LmResult result;
  result.x = std::move(x0);
  if (problem.refresh) problem.refresh(result.x);

  Eigen::VectorXd r;
  double cost = 0.0;
  if (!evaluate(problem, result.x, r, cost)) {
    fail(ErrorCode::kNumeric, "residual is not finite at the initial point");
  }

  Eigen::MatrixXd jac;
  Eigen::VectorXd trial_r;
  double damping = options.initial_damping;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    problem.jacobian(result.x, jac);
    const Eigen::VectorXd gradient = jac.transpose() * r;
    if (gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      result.converged = true;
      break;
    }
    const Eigen::MatrixXd normal = jac.transpose() * jac;

    bool accepted = false;
    bool small_step = false;
    while (damping <= options.max_damping) {
      Eigen::MatrixXd damped = normal;
      damped.diagonal().array() += damping;
      const Eigen::VectorXd step = damped.ldlt().solve(-gradient);
      if (!step.allFinite()) {
        damping *= 10.0;
        continue;
      }
      if (step.norm() < options.step_tolerance) {
        small_step = true;
        break;
      }
      const Eigen::VectorXd trial = result.x + step;
      double trial_cost = 0.0;
      if (evaluate(problem, trial, trial_r, trial_cost) && trial_cost < cost) {
        result.x = trial;
        r.swap(trial_r);
        cost = trial_cost;
        damping = std::max(damping / 10.0, 1e-15);
        accepted = true;
        break;
      }
      damping *= 10.0;
    }
    result.iterations = iter + 1;
    if (small_step) {
      result.converged = true;
      break;
    }
    if (!accepted) {
      // Damping exhausted: no descent direction left at this precision.
      result.converged = true;
      break;
    }
    result.accepted_objectives.push_back(cost);
    if (problem.refresh) {
      problem.refresh(result.x);
      if (!evaluate(problem, result.x, r, cost)) {
        fail(ErrorCode::kNumeric, "residual became undefined after refresh");
      }
    }
  }
  result.objective = cost;
  return result;
}

}  // namespace scenemock
