// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#include "scenemock/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scenemock/error.hpp"

namespace scenemock {

Candidate make_candidate(const TemplateModel& model, const Camera& camera,
                         const PlacementParams& params, double fit_score) {
  Candidate c;
  c.params = params;
  c.fit_score = fit_score;
  c.box = object_box(model, params);
  const Eigen::MatrixX3d world = place_keypoints(model.instantiate(params.deform), params);
  c.projected.reserve(world.rows());
  for (Eigen::Index i = 0; i < world.rows(); ++i) {
    c.projected.push_back(camera.project(world.row(i).transpose()));
  }
  return c;
}

double unary_score(std::span<const Vec2> projected, const KeypointMapStack& maps) {
  require(static_cast<int>(projected.size()) == maps.channels(),
          "candidate keypoint count must equal the map channel count");
  const double sigma = maps.sigma();
  const double radius = 4.0 * sigma;
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const int w = maps.width();
  const int h = maps.height();
  double num = 0.0;
  double den = 0.0;
  for (int type = 0; type < maps.channels(); ++type) {
    const Vec2& p = projected[type];
    const int c0 = std::max(0, static_cast<int>(std::floor(p.x() - 0.5 - radius)));
    const int c1 = std::min(w - 1, static_cast<int>(std::ceil(p.x() - 0.5 + radius)));
    const int r0 = std::max(0, static_cast<int>(std::floor(p.y() - 0.5 - radius)));
    const int r1 = std::min(h - 1, static_cast<int>(std::ceil(p.y() - 0.5 + radius)));
    for (int r = r0; r <= r1; ++r) {
      const double dy = r + 0.5 - p.y();
      for (int c = c0; c <= c1; ++c) {
        const double dx = c + 0.5 - p.x();
        const double d2 = dx * dx + dy * dy;
        if (d2 > radius * radius) continue;
        // Same float rounding as render_maps, so n == m gives exactly 1.
        const double n = static_cast<float>(std::exp(-d2 * inv));
        const double m = maps.at(type, c, r);
        num += (n * m) * (n * m);
        den += (n * n) * (n * n);
      }
    }
  }
  if (!(den > 0.0)) fail(ErrorCode::kZeroSupport, "candidate renders no keypoint on the grid");
  return std::sqrt(num) / std::sqrt(den);
}

double unary_energy(std::span<const Vec2> projected, const KeypointMapStack& maps,
                    double alpha) {
  require(alpha > 0.0, "alpha must be positive");
  const double u = unary_score(projected, maps);
  return clamped_neg_logit(u > 0.0 ? std::pow(u, alpha) : 0.0);
}

double SelectionProblem::energy(std::span<const int> selected) const {
  double e = 0.0;
  for (std::size_t a = 0; a < selected.size(); ++a) {
    e += unary[selected[a]];
    for (std::size_t b = a + 1; b < selected.size(); ++b) {
      if (is_forbidden(selected[a], selected[b])) {
        return std::numeric_limits<double>::infinity();
      }
      e += pairwise(selected[a], selected[b]);
    }
  }
  return e;
}

namespace {

double pair_density_energy(const PairDensity& density, const ObjectPose& a,
                           const ObjectPose& b, double beta) {
  const double d = density(relative_pose(a, b));
  return clamped_neg_logit(d > 0.0 ? std::exp(beta * std::log(d)) : 0.0);
}

}  // namespace

SelectionProblem build_problem(std::span<const Candidate> candidates,
                               std::span<const Candidate> fixed, const PairDensity& density,
                               const BuildOptions& options) {
  SelectionProblem problem;
  for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
    const bool blocked = std::any_of(fixed.begin(), fixed.end(), [&](const Candidate& f) {
      return obb_intersects(candidates[i].box, f.box, options.shrink);
    });
    if (!blocked) problem.candidate_index.push_back(i);
  }
  const int n = static_cast<int>(problem.candidate_index.size());
  problem.unary.resize(n);
  problem.pairwise = Eigen::MatrixXd::Zero(n, n);
  problem.forbidden.assign(n, std::vector<char>(n, 0));

  for (int v = 0; v < n; ++v) {
    const Candidate& c = candidates[problem.candidate_index[v]];
    double u = c.unary;
    if (density) {
      for (const Candidate& f : fixed) {
        if ((c.pose().translation - f.pose().translation).norm() > options.delta_r) continue;
        u += pair_density_energy(density, f.pose(), c.pose(), options.beta);
      }
    }
    problem.unary[v] = u;
  }
  for (int a = 0; a < n; ++a) {
    const Candidate& ca = candidates[problem.candidate_index[a]];
    for (int b = a + 1; b < n; ++b) {
      const Candidate& cb = candidates[problem.candidate_index[b]];
      if (obb_intersects(ca.box, cb.box, options.shrink)) {
        problem.forbidden[a][b] = problem.forbidden[b][a] = 1;
      }
      if (!density) continue;
      if ((ca.pose().translation - cb.pose().translation).norm() > options.delta_r) continue;
      // The mixture is fit on both directions of every pair; average them so
      // the term does not depend on candidate order.
      const double d = 0.5 * (density(relative_pose(ca.pose(), cb.pose())) +
                              density(relative_pose(cb.pose(), ca.pose())));
      const double e = clamped_neg_logit(d > 0.0 ? std::exp(options.beta * std::log(d)) : 0.0);
      problem.pairwise(a, b) = problem.pairwise(b, a) = e;
    }
  }
  return problem;
}

namespace {

class BranchAndBound {
 public:
  explicit BranchAndBound(const SelectionProblem& p) : p_(p), n_(p.size()) {
    // Sum of negative pairwise energies among variables >= pos.
    tail_negative_pairs_.assign(n_ + 1, 0.0);
    for (int pos = n_ - 1; pos >= 0; --pos) {
      double s = 0.0;
      for (int j = pos + 1; j < n_; ++j) {
        if (!p_.is_forbidden(pos, j)) s += std::min(0.0, p_.pairwise(pos, j));
      }
      tail_negative_pairs_[pos] = tail_negative_pairs_[pos + 1] + s;
    }
  }

  std::vector<int> run() {
    best_energy_ = 0.0;
    best_.clear();
    chosen_.clear();
    recurse(0, 0.0);
    return best_;
  }

 private:
  double lower_bound(int pos, double energy) const {
    double bound = energy + tail_negative_pairs_[pos];
    for (int j = pos; j < n_; ++j) {
      double gain = p_.unary[j];
      bool allowed = true;
      for (int i : chosen_) {
        if (p_.is_forbidden(i, j)) {
          allowed = false;
          break;
        }
        gain += p_.pairwise(i, j);
      }
      if (allowed) bound += std::min(0.0, gain);
    }
    return bound;
  }

  void recurse(int pos, double energy) {
    if (pos == n_) {
      const double exact = p_.energy(chosen_);
      if (exact < best_energy_) {
        best_energy_ = exact;
        best_ = chosen_;
      }
      return;
    }
    const double slack = 1e-9 * (1.0 + std::abs(best_energy_));
    if (lower_bound(pos, energy) > best_energy_ + slack) return;

    bool allowed = true;
    double gain = p_.unary[pos];
    for (int i : chosen_) {
      if (p_.is_forbidden(i, pos)) {
        allowed = false;
        break;
      }
      gain += p_.pairwise(i, pos);
    }
    if (allowed) {
      chosen_.push_back(pos);
      recurse(pos + 1, energy + gain);
      chosen_.pop_back();
    }
    recurse(pos + 1, energy);
  }

  const SelectionProblem& p_;
  int n_;
  std::vector<double> tail_negative_pairs_;
  std::vector<int> chosen_;
  std::vector<int> best_;
  double best_energy_ = 0.0;
};

// Energy change from toggling `v` into the set.
double insertion_gain(const SelectionProblem& p, const std::vector<char>& in, int v) {
  double gain = p.unary[v];
  for (int i = 0; i < p.size(); ++i) {
    if (!in[i]) continue;
    if (p.is_forbidden(i, v)) return std::numeric_limits<double>::infinity();
    gain += p.pairwise(i, v);
  }
  return gain;
}

std::vector<int> to_indices(const std::vector<char>& in) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(in.size()); ++i) {
    if (in[i]) out.push_back(i);
  }
  return out;
}

}  // namespace

std::vector<int> solve_exact(const SelectionProblem& problem) {
  return BranchAndBound(problem).run();
}

std::vector<int> solve_greedy(const SelectionProblem& problem) {
  const int n = problem.size();
  std::vector<char> in(n, 0);
  constexpr double kEps = 1e-12;

  // Greedy insertion by most negative marginal gain.
  while (true) {
    int best = -1;
    double best_gain = -kEps;
    for (int v = 0; v < n; ++v) {
      if (in[v]) continue;
      const double g = insertion_gain(problem, in, v);
      if (g < best_gain) {
        best_gain = g;
        best = v;
      }
    }
    if (best < 0) break;
    in[best] = 1;
  }

  // 1-flip and 2-swap local search.
  bool improved = true;
  while (improved) {
    improved = false;
    for (int v = 0; v < n && !improved; ++v) {
      if (in[v]) {
        in[v] = 0;
        const double removal = -insertion_gain(problem, in, v);
        if (removal < -kEps) {
          improved = true;
        } else {
          in[v] = 1;
        }
      } else if (insertion_gain(problem, in, v) < -kEps) {
        in[v] = 1;
        improved = true;
      }
    }
    for (int out_v = 0; out_v < n && !improved; ++out_v) {
      if (!in[out_v]) continue;
      in[out_v] = 0;
      const double removal = -insertion_gain(problem, in, out_v);
      for (int in_v = 0; in_v < n; ++in_v) {
        if (in[in_v] || in_v == out_v) continue;
        if (removal + insertion_gain(problem, in, in_v) < -kEps) {
          in[in_v] = 1;
          improved = true;
          break;
        }
      }
      if (!improved) in[out_v] = 1;
    }
  }
  return to_indices(in);
}

std::vector<int> solve(const SelectionProblem& problem) {
  if (problem.size() <= kExactSolverLimit) return solve_exact(problem);
  return solve_greedy(problem);
}

bool plausible_shape(const TemplateModel& model, const Eigen::VectorXd& deform,
                     double max_sigma) {
  if (max_sigma <= 0.0) return true;
  require(deform.size() == model.modes(), "deform length must equal the template mode count");
  for (int k = 0; k < model.modes(); ++k) {
    if (std::abs(deform(k)) > max_sigma * std::sqrt(model.eigenvalues()(k))) return false;
  }
  return true;
}

std::vector<Candidate> dedupe(std::vector<Candidate> candidates, double iou, double azimuth) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.fit_score < b.fit_score; });
  std::vector<Candidate> kept;
  for (auto& c : candidates) {
    const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const Candidate& k) {
      return std::abs(wrap_angle(k.params.azimuth - c.params.azimuth)) < azimuth &&
             obb_iou_3d(k.box, c.box) > iou;
    });
    if (!duplicate) kept.push_back(std::move(c));
  }
  return kept;
}

InferredScene infer_scene(const KeypointMapStack& maps, const Camera& camera,
                          const TemplateModel& model, const PairwiseGmm* gmm,
                          const InferenceOptions& options) {
  require(maps.channels() == model.keypoint_count(),
          "map channel count must equal the template keypoint count");
  require(!options.use_pairwise || gmm != nullptr, "pairwise inference needs a mixture model");
  require(options.max_iterations >= 1, "max_iterations must be at least 1");

  const KeypointLocations locations = extract_locations(maps, options.tau_m);
  const auto pairs = propose_pairs(locations);

  FitProblem pair_problem;
  pair_problem.camera = &camera;
  pair_problem.model = &model;
  pair_problem.stage = FitStage::kPairInit;
  pair_problem.alpha_scale = options.alpha_scale;
  pair_problem.alpha_deform = options.alpha_deform;

  std::vector<PlacementParams> seeds;
  seeds.reserve(pairs.size());
  for (const auto& pair : pairs) {
    pair_problem.anchors = pair;
    const FitResult r = fit_initial(pair_problem);
    if (!r.rejected()) seeds.push_back(r.params);
  }

  PairDensity density;
  if (options.use_pairwise) {
    density = [gmm](const RelativePose& pose) { return scenemock::density(*gmm, pose); };
  }
  BuildOptions build;
  build.beta = options.beta;
  build.shrink = options.shrink;
  if (gmm != nullptr && options.use_pairwise) build.delta_r = gmm->delta_r();

  InferredScene scene;
  std::vector<Candidate> fixed;
  const int nk = model.keypoint_count();
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    FitProblem refine;
    refine.camera = &camera;
    refine.model = &model;
    refine.stage = FitStage::kMapRefine;
    refine.maps = &maps;
    refine.alpha_scale = options.alpha_scale;
    refine.alpha_deform = options.alpha_deform;
    if (options.use_pairwise && !fixed.empty()) {
      FitPrior prior;
      prior.gmm = gmm;
      for (const auto& f : fixed) prior.fixed.push_back(f.pose());
      refine.prior = std::move(prior);
    }

    IterationStats stats;
    std::vector<Candidate> accepted;
    for (const auto& seed : seeds) {
      const FitResult r = fit_refine(refine, seed);
      if (r.rejected()) continue;
      ++stats.refined;
      const double score = r.acceptance_score(nk);
      if (!(score < options.tau_u)) continue;
      if (!plausible_shape(model, r.params.deform, options.max_deform_sigma)) continue;
      try {
        Candidate c = make_candidate(model, camera, r.params, score);
        c.unary = unary_energy(c.projected, maps, options.alpha);
        accepted.push_back(std::move(c));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kBehindCamera && e.code() != ErrorCode::kZeroSupport) throw;
      }
    }
    stats.accepted = static_cast<int>(accepted.size());
    std::vector<Candidate> candidates =
        dedupe(std::move(accepted), options.dedupe_iou, options.dedupe_azimuth);

    const SelectionProblem problem = build_problem(candidates, fixed, density, build);
    stats.candidates = problem.size();
    const std::vector<int> selected = solve(problem);
    stats.selected = static_cast<int>(selected.size());
    scene.iterations.push_back(stats);
    scene.iterations_used = iter + 1;
    if (selected.empty()) break;
    for (int v : selected) {
      Candidate c = candidates[problem.candidate_index[v]];
      InferredObject obj;
      obj.params = c.params;
      obj.box = c.box;
      obj.iteration = iter + 1;
      obj.model_id = model.members().empty() ? std::string() : model.nearest_model(c.params.deform);
      scene.objects.push_back(std::move(obj));
      fixed.push_back(std::move(c));
    }
  }
  return scene;
}

}  // namespace scenemock
