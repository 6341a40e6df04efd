// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "posesym/defaults.hpp"
#include "posesym/object_model.hpp"
#include "posesym/pose.hpp"

namespace posesym {

/// A pose with a score (higher is better), used for votes and hypotheses.
struct ScoredPose {
  Pose pose;
  double score = 0.0;
  std::string id;
};

/// Weighted mean in representative space. The reference is the highest-scored
/// pose; each pose contributes its representative nearest to the reference's
/// first representative, weighted by its score. The mean is projected back
/// onto the embedding. Requires nonnegative scores with at least one positive.
Pose average(std::span<const ScoredPose> poses, const ObjectModel& object);

/// Same with explicit weights and reference pose.
Pose weighted_average(std::span<const Pose> poses, std::span<const double> weights,
                      const Pose& reference, const ObjectModel& object);

enum class Kernel {
  epanechnikov,  // K(d) = 1 − (d/h)² on d < h
  gaussian,      // σ = h/3, truncated at 3σ = h
};

struct MeanShiftParams {
  double bandwidth = 0.0;
  /// Explicit seeds; when empty the `seed_count` highest-scored votes are used.
  std::vector<Pose> seeds;
  std::size_t seed_count = kDefaultKeep;
  int max_iterations = 100;
  /// Convergence threshold on the pose distance moved by one iteration;
  /// defaults to 1e-6 × bandwidth when not positive.
  double tolerance = 0.0;
  Kernel kernel = Kernel::epanechnikov;
  /// Modes closer than merge_fraction × bandwidth are merged.
  double merge_fraction = kDefaultModeMergeFraction;
  /// Worker threads over seeds; 0 picks the hardware concurrency.
  unsigned threads = 1;
};

struct Mode {
  Pose pose;
  /// Kernel-weighted vote mass Σ score·K(d) at the mode.
  double density = 0.0;
  std::size_t seed = 0;
  int iterations = 0;
  /// Density at the seed and after every iteration.
  std::vector<double> density_trace;
};

/// Kernel density of the votes at `at`.
double vote_density(std::span<const ScoredPose> votes, const Pose& at,
                    const ObjectModel& object, double bandwidth,
                    Kernel kernel = Kernel::epanechnikov);

/// Mean-shift mode seeking over pose votes. From each seed, repeatedly
/// averages the votes inside the bandwidth window (weights: score times the
/// kernel's shadow profile, which is flat for Epanechnikov) and projects the
/// mean back to a pose, until the move is below tolerance. Modes are then
/// merged, keeping the denser one, and returned by decreasing density.
std::vector<Mode> mean_shift(std::span<const ScoredPose> votes, const ObjectModel& object,
                             const MeanShiftParams& params);

/// Greedy non-maximum suppression by descending score (stable on ties):
/// a hypothesis is retained iff its distance to every retained one exceeds
/// `radius`; stops after `keep`. Returns input indices in retention order.
/// Inherently sequential.
std::vector<std::size_t> filter_duplicate_indices(std::span<const ScoredPose> hypotheses,
                                                  const ObjectModel& object, double radius,
                                                  std::size_t keep = kDefaultKeep);

std::vector<ScoredPose> filter_duplicates(std::span<const ScoredPose> hypotheses,
                                          const ObjectModel& object, double radius,
                                          std::size_t keep = kDefaultKeep);

}  // namespace posesym
