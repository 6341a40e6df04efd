// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#include "posesym/pose_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "posesym/error.hpp"
#include "posesym/kdtree.hpp"
#include "posesym/pose_index.hpp"
#include "posesym/pose_metric.hpp"

namespace posesym {

namespace {

std::vector<std::size_t> indices_by_score(std::span<const ScoredPose> poses) {
  std::vector<std::size_t> order(poses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return poses[a].score > poses[b].score;
  });
  return order;
}

Pose finish_projection(std::span<const double> mean, const Pose& reference,
                       const ObjectModel& object) {
  Pose out = pose_from_representative(mean, object);
  if (object.symmetry_class() == SymmetryClass::spherical) out.rotation = reference.rotation;
  return out;
}

double kernel_value(Kernel k, double d, double h) {
  if (!(d < h)) return 0.0;
  const double u = d / h;
  if (k == Kernel::epanechnikov) return 1.0 - u * u;
  // σ = h/3
  return std::exp(-4.5 * u * u);
}

// Weight of a vote in the mean-shift average: the shadow profile of the
// density kernel (flat for Epanechnikov, the Gaussian itself for Gaussian).
double shadow_weight(Kernel k, double d, double h) {
  if (!(d < h)) return 0.0;
  if (k == Kernel::epanechnikov) return 1.0;
  const double u = d / h;
  return std::exp(-4.5 * u * u);
}

}  // namespace

Pose weighted_average(std::span<const Pose> poses, std::span<const double> weights,
                      const Pose& reference, const ObjectModel& object) {
  if (poses.empty()) throw UsageError("average of an empty pose list");
  if (poses.size() != weights.size()) throw UsageError("pose and weight counts differ");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw UsageError("weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw UsageError("at least one weight must be positive");

  const int dim = representative_dim(object.symmetry_class());
  double anchor[12];
  first_representative(reference, object, anchor);
  std::vector<double> mean(dim, 0.0);
  std::vector<double> reps;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    if (weights[i] == 0.0) continue;
    reps.clear();
    append_representatives(poses[i], object, reps);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r * dim < reps.size(); ++r) {
      const double d = squared_point_distance(reps.data() + r * dim, anchor, dim);
      if (d < best_d) {
        best_d = d;
        best = r;
      }
    }
    for (int k = 0; k < dim; ++k) mean[k] += weights[i] * reps[best * dim + k];
  }
  for (double& m : mean) m /= total;
  return finish_projection(mean, reference, object);
}

Pose average(std::span<const ScoredPose> poses, const ObjectModel& object) {
  if (poses.empty()) throw UsageError("average of an empty pose list");
  std::vector<Pose> ps;
  std::vector<double> ws;
  ps.reserve(poses.size());
  ws.reserve(poses.size());
  std::size_t ref = 0;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    ps.push_back(poses[i].pose);
    ws.push_back(poses[i].score);
    if (poses[i].score > poses[ref].score) ref = i;
  }
  return weighted_average(ps, ws, poses[ref].pose, object);
}

double vote_density(std::span<const ScoredPose> votes, const Pose& at,
                    const ObjectModel& object, double bandwidth, Kernel kernel) {
  double acc = 0.0;
  for (const auto& v : votes) {
    acc += v.score * kernel_value(kernel, distance(at, v.pose, object), bandwidth);
  }
  return acc;
}

std::vector<Mode> mean_shift(std::span<const ScoredPose> votes, const ObjectModel& object,
                             const MeanShiftParams& params) {
  const double h = params.bandwidth;
  if (!(h > 0.0) || !std::isfinite(h)) throw UsageError("bandwidth must be > 0");
  if (votes.empty()) throw UsageError("mean shift needs at least one vote");
  if (params.max_iterations < 0) throw UsageError("max_iterations must be >= 0");
  for (const auto& v : votes) {
    if (!(v.score >= 0.0) || !std::isfinite(v.score)) {
      throw UsageError("vote scores must be finite and >= 0");
    }
  }
  const double tol = params.tolerance > 0.0 ? params.tolerance : 1e-6 * h;

  std::vector<Pose> vote_poses;
  vote_poses.reserve(votes.size());
  for (const auto& v : votes) vote_poses.push_back(v.pose);
  const PoseIndex index(vote_poses, object);
  const int dim = index.dim();

  std::vector<Pose> seeds = params.seeds;
  if (seeds.empty()) {
    const auto order = indices_by_score(votes);
    const std::size_t n = std::min(params.seed_count, order.size());
    for (std::size_t i = 0; i < n; ++i) seeds.push_back(votes[order[i]].pose);
  }

  auto density_at = [&](const Pose& p) {
    double acc = 0.0;
    for (const auto& hit : index.radius_search(p, h)) {
      acc += votes[hit.pose_id].score * kernel_value(params.kernel, hit.distance, h);
    }
    return acc;
  };

  auto climb = [&](std::size_t s) {
    Mode m;
    m.seed = s;
    m.pose = seeds[s];
    m.density = density_at(m.pose);
    m.density_trace.push_back(m.density);
    std::vector<double> mean(dim);
    for (int it = 0; it < params.max_iterations; ++it) {
      const auto hits = index.radius_search(m.pose, h);
      std::fill(mean.begin(), mean.end(), 0.0);
      double total = 0.0;
      for (const auto& hit : hits) {
        const double w = votes[hit.pose_id].score * shadow_weight(params.kernel, hit.distance, h);
        if (w == 0.0) continue;
        const auto pt = index.representative(hit.pose_id, hit.representative);
        for (int k = 0; k < dim; ++k) mean[k] += w * pt[k];
        total += w;
      }
      if (!(total > 0.0)) break;
      for (double& x : mean) x /= total;
      const Pose next = finish_projection(mean, m.pose, object);
      const double shift = distance(m.pose, next, object);
      m.pose = next;
      m.density = density_at(m.pose);
      m.density_trace.push_back(m.density);
      m.iterations = it + 1;
      if (shift < tol) break;
    }
    return m;
  };

  std::vector<Mode> raw(seeds.size());
  unsigned threads = params.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : params.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, seeds.size()));
  if (threads <= 1) {
    for (std::size_t s = 0; s < seeds.size(); ++s) raw[s] = climb(s);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < seeds.size(); s += threads) raw[s] = climb(s);
      });
    }
  }

  std::stable_sort(raw.begin(), raw.end(),
                   [](const Mode& a, const Mode& b) { return a.density > b.density; });
  std::vector<Mode> modes;
  const double merge = params.merge_fraction * h;
  for (auto& m : raw) {
    const bool duplicate = std::any_of(modes.begin(), modes.end(), [&](const Mode& kept) {
      return distance(kept.pose, m.pose, object) < merge;
    });
    if (!duplicate) modes.push_back(std::move(m));
  }
  return modes;
}

std::vector<std::size_t> filter_duplicate_indices(std::span<const ScoredPose> hypotheses,
                                                  const ObjectModel& object, double radius,
                                                  std::size_t keep) {
  if (!(radius >= 0.0)) throw UsageError("radius must be >= 0");
  if (keep < 1) throw UsageError("keep must be >= 1");
  for (const auto& h : hypotheses) {
    if (!std::isfinite(h.score)) throw UsageError("hypothesis scores must be finite");
  }
  std::vector<std::size_t> retained;
  for (std::size_t i : indices_by_score(hypotheses)) {
    if (retained.size() >= keep) break;
    const bool clear = std::all_of(retained.begin(), retained.end(), [&](std::size_t j) {
      return distance(hypotheses[i].pose, hypotheses[j].pose, object) > radius;
    });
    if (clear) retained.push_back(i);
  }
  return retained;
}

std::vector<ScoredPose> filter_duplicates(std::span<const ScoredPose> hypotheses,
                                          const ObjectModel& object, double radius,
                                          std::size_t keep) {
  std::vector<ScoredPose> out;
  for (std::size_t i : filter_duplicate_indices(hypotheses, object, radius, keep)) {
    out.push_back(hypotheses[i]);
  }
  return out;
}

}  // namespace posesym
