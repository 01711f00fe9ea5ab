// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#include "scenemock/scene_stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include <Eigen/Cholesky>

#include "scenemock/error.hpp"

namespace scenemock {

namespace {

std::atomic<std::uint64_t> g_evaluations{0};

const double kLog2Pi = std::log(2.0 * kPi);

Eigen::Vector3d wrapped_difference(const Eigen::Vector3d& x, const Eigen::Vector3d& mean) {
  Eigen::Vector3d d = x - mean;
  d.z() = wrap_angle(d.z());
  return d;
}

}  // namespace

RelativePose relative_pose(const ObjectPose& reference, const ObjectPose& other) {
  RelativePose pose;
  pose.delta_t = rotate_ground(-reference.azimuth, other.translation - reference.translation);
  pose.delta_theta = wrap_angle(other.azimuth - reference.azimuth);
  return pose;
}

PairwiseGmm::PairwiseGmm(std::vector<GaussianComponent> components, double delta_r,
                         double diag_bias)
    : components_(std::move(components)), delta_r_(delta_r), diag_bias_(diag_bias) {
  require(!components_.empty(), "mixture needs at least one component");
  require(delta_r > 0.0, "mixture pair radius must be positive");
  double total = 0.0;
  for (auto& c : components_) {
    require(c.weight > 0.0 && std::isfinite(c.weight), "mixture weights must be positive");
    require(c.mean.allFinite(), "mixture mean is not finite");
    require((c.covariance - c.covariance.transpose()).cwiseAbs().maxCoeff() <= 1e-9,
            "mixture covariance is not symmetric");
    c.mean.z() = wrap_angle(c.mean.z());
    total += c.weight;
  }
  require(std::abs(total - 1.0) <= 1e-9, "mixture weights must sum to one");
  for (const auto& c : components_) {
    Eigen::LLT<Eigen::Matrix3d> llt(c.covariance);
    if (llt.info() != Eigen::Success) {
      fail(ErrorCode::kNumeric, "mixture covariance is not positive definite");
    }
    const Eigen::Matrix3d lower = llt.matrixL();
    whitening_.push_back(lower.triangularView<Eigen::Lower>().solve(Eigen::Matrix3d::Identity()));
    const double log_det = 2.0 * lower.diagonal().array().log().sum();
    log_normalizer_.push_back(-1.5 * kLog2Pi - 0.5 * log_det);
  }
}

Eigen::Vector3d PairwiseGmm::difference(const RelativePose& pose, int component) const {
  return wrapped_difference(pose.vector(), components_[component].mean);
}

std::vector<RelativePose> extract_pairs(std::span<const std::vector<ObjectPose>> scenes,
                                        double delta_r) {
  std::vector<RelativePose> out;
  for (const auto& scene : scenes) {
    for (std::size_t i = 0; i < scene.size(); ++i) {
      for (std::size_t j = 0; j < scene.size(); ++j) {
        if (i == j) continue;
        if ((scene[j].translation - scene[i].translation).norm() > delta_r) continue;
        out.push_back(relative_pose(scene[i], scene[j]));
      }
    }
  }
  return out;
}

namespace {

struct EmState {
  std::vector<double> weights;
  std::vector<Eigen::Vector3d> means;
  std::vector<Eigen::Matrix3d> covariances;
};

struct EmOutcome {
  std::optional<EmState> state;
  int collapsed = 0;
  std::vector<double> objective;
  int iterations = 0;
};

std::vector<Eigen::Vector3d> kmeans_plus_plus(const std::vector<Eigen::Vector3d>& x, int k,
                                              std::mt19937_64& rng) {
  std::vector<Eigen::Vector3d> centers;
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  centers.push_back(x[pick(rng)]);
  std::vector<double> d2(x.size(), std::numeric_limits<double>::infinity());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      d2[i] = std::min(d2[i], wrapped_difference(x[i], centers.back()).squaredNorm());
      total += d2[i];
    }
    if (!(total > 0.0)) {
      centers.push_back(centers.back());
      continue;
    }
    double target = unit(rng) * total;
    std::size_t chosen = x.size() - 1;
    for (std::size_t i = 0; i < x.size(); ++i) {
      target -= d2[i];
      if (target <= 0.0 && d2[i] > 0.0) {
        chosen = i;
        break;
      }
    }
    centers.push_back(x[chosen]);
  }
  return centers;
}

EmOutcome run_em(const std::vector<Eigen::Vector3d>& x, int k, std::uint64_t seed,
                 const GmmFitOptions& options) {
  const auto n = x.size();
  const double bias = options.diag_bias;
  std::mt19937_64 rng(seed);

  EmState state;
  state.means = kmeans_plus_plus(x, k, rng);
  state.weights.assign(k, 1.0 / k);
  {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& v : x) mean += wrapped_difference(v, x.front());
    mean = x.front() + mean / static_cast<double>(n);
    Eigen::Vector3d var = Eigen::Vector3d::Zero();
    for (const auto& v : x) var += wrapped_difference(v, mean).cwiseAbs2();
    var /= static_cast<double>(n);
    const Eigen::Matrix3d init =
        Eigen::Matrix3d(var.asDiagonal()) + bias * Eigen::Matrix3d::Identity();
    state.covariances.assign(k, init);
  }

  EmOutcome outcome;
  Eigen::MatrixXd resp(n, k);
  std::vector<double> log_terms(k);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // E-step on the bias-penalised likelihood.
    std::vector<Eigen::Matrix3d> whitening(k);
    std::vector<double> log_scale(k);
    for (int c = 0; c < k; ++c) {
      Eigen::LLT<Eigen::Matrix3d> llt(state.covariances[c]);
      const Eigen::Matrix3d lower = llt.matrixL();
      whitening[c] =
          lower.triangularView<Eigen::Lower>().solve(Eigen::Matrix3d::Identity());
      const double log_det = 2.0 * lower.diagonal().array().log().sum();
      const double trace_inv = whitening[c].squaredNorm();
      log_scale[c] = std::log(state.weights[c]) - 1.5 * kLog2Pi - 0.5 * log_det -
                     0.5 * bias * trace_inv;
    }
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double top = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const Eigen::Vector3d w = whitening[c] * wrapped_difference(x[i], state.means[c]);
        log_terms[c] = log_scale[c] - 0.5 * w.squaredNorm();
        top = std::max(top, log_terms[c]);
      }
      double sum = 0.0;
      for (int c = 0; c < k; ++c) sum += std::exp(log_terms[c] - top);
      const double lse = top + std::log(sum);
      objective += lse;
      for (int c = 0; c < k; ++c) resp(i, c) = std::exp(log_terms[c] - lse);
    }
    objective /= static_cast<double>(n);
    outcome.objective.push_back(objective);
    outcome.iterations = iter + 1;
    const auto m = outcome.objective.size();
    if (m >= 2 && outcome.objective[m - 1] - outcome.objective[m - 2] < options.tolerance) {
      break;
    }

    // M-step.
    for (int c = 0; c < k; ++c) {
      const double nk = resp.col(c).sum();
      if (nk / static_cast<double>(n) < 1e-6) ++outcome.collapsed;
    }
    if (outcome.collapsed > 0) return outcome;
    for (int c = 0; c < k; ++c) {
      const double nk = resp.col(c).sum();
      Eigen::Vector3d shift = Eigen::Vector3d::Zero();
      for (std::size_t i = 0; i < n; ++i) {
        shift += resp(i, c) * wrapped_difference(x[i], state.means[c]);
      }
      Eigen::Vector3d mean = state.means[c] + shift / nk;
      mean.z() = wrap_angle(mean.z());
      Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
      for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d d = wrapped_difference(x[i], mean);
        scatter += resp(i, c) * d * d.transpose();
      }
      state.weights[c] = nk / static_cast<double>(n);
      state.means[c] = mean;
      state.covariances[c] = scatter / nk + bias * Eigen::Matrix3d::Identity();
      state.covariances[c] = 0.5 * (state.covariances[c] + state.covariances[c].transpose());
    }
  }
  outcome.state = std::move(state);
  return outcome;
}

}  // namespace

PairwiseGmm fit_gmm(std::span<const RelativePose> samples, int n_components,
                    std::uint64_t seed, const GmmFitOptions& options, GmmFitTrace* trace) {
  require(n_components >= 1, "mixture needs at least one component");
  if (samples.size() < 10 * static_cast<std::size_t>(n_components)) {
    fail(ErrorCode::kInsufficientSamples,
         "need at least " + std::to_string(10 * n_components) + " samples, got " +
             std::to_string(samples.size()));
  }
  std::vector<Eigen::Vector3d> x;
  x.reserve(samples.size());
  for (const auto& s : samples) {
    Eigen::Vector3d v = s.vector();
    v.z() = wrap_angle(v.z());
    x.push_back(v);
  }

  int k = n_components;
  EmOutcome outcome = run_em(x, k, seed, options);
  int restarts = 0;
  if (!outcome.state) {
    k = std::max(1, k - outcome.collapsed);
    ++restarts;
    outcome = run_em(x, k, seed, options);
    if (!outcome.state) {
      fail(ErrorCode::kCollapsedComponent, "mixture component collapsed after restart");
    }
  }
  if (trace != nullptr) {
    trace->objective = outcome.objective;
    trace->restarts = restarts;
    trace->iterations = outcome.iterations;
  }

  const EmState& state = *outcome.state;
  double total = 0.0;
  for (double w : state.weights) total += w;
  std::vector<GaussianComponent> components;
  for (int c = 0; c < k; ++c) {
    components.push_back({state.weights[c] / total, state.means[c], state.covariances[c]});
  }
  return PairwiseGmm(std::move(components), options.delta_r, options.diag_bias);
}

double density(const PairwiseGmm& gmm, const RelativePose& pose) {
  g_evaluations.fetch_add(1, std::memory_order_relaxed);
  double sum = 0.0;
  for (int c = 0; c < gmm.size(); ++c) {
    const Eigen::Vector3d w = gmm.whitening(c) * gmm.difference(pose, c);
    sum += gmm.components()[c].weight * std::exp(gmm.log_normalizer(c) - 0.5 * w.squaredNorm());
  }
  return sum;
}

MaxMixtureTerm maxmix_nll(const PairwiseGmm& gmm, const RelativePose& pose) {
  g_evaluations.fetch_add(1, std::memory_order_relaxed);
  MaxMixtureTerm best{std::numeric_limits<double>::infinity(), 0};
  for (int c = 0; c < gmm.size(); ++c) {
    const Eigen::Vector3d w = gmm.whitening(c) * gmm.difference(pose, c);
    const double value = 0.5 * w.squaredNorm() - std::log(gmm.components()[c].weight) -
                         gmm.log_normalizer(c);
    if (value < best.value) best = {value, c};
  }
  return best;
}

double clamped_neg_logit(double p) {
  const double q = std::clamp(p, kLogitEpsilon, 1.0 - kLogitEpsilon);
  return -std::log(q / (1.0 - q));
}

double pair_energy(const PairwiseGmm& gmm, const RelativePose& pose, double beta) {
  require(beta > 0.0, "beta must be positive");
  const double d = density(gmm, pose);
  const double scaled = d > 0.0 ? std::exp(beta * std::log(d)) : 0.0;
  return clamped_neg_logit(scaled);
}

std::uint64_t gmm_evaluation_count() { return g_evaluations.load(std::memory_order_relaxed); }
void reset_gmm_evaluation_count() { g_evaluations.store(0, std::memory_order_relaxed); }

}  // namespace scenemock
