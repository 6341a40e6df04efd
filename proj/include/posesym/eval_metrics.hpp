// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "posesym/defaults.hpp"
#include "posesym/object_model.hpp"
#include "posesym/pose.hpp"
#include "posesym/pose_space.hpp"

namespace posesym {

struct GroundTruthInstance {
  Pose pose;
  double occlusion_rate = 0.0;  // in [0, 1]
};

/// Outcome of matching one scene. Prediction and ground-truth ids are
/// positions in the respective input lists.
struct SceneEval {
  std::vector<std::pair<std::size_t, std::size_t>> true_positives;  // (prediction, gt)
  std::vector<std::size_t> false_positives;
  std::vector<std::size_t> false_negatives;
  /// Predictions mutually matched to an instance outside the interest set;
  /// these count neither as true nor as false positives.
  std::size_t uninteresting_matches = 0;

  std::size_t tp() const { return true_positives.size(); }
  std::size_t fp() const { return false_positives.size(); }
  std::size_t fn() const { return false_negatives.size(); }
};

struct PrecisionRecall {
  std::optional<double> precision;  // absent when TP + FP = 0
  std::optional<double> recall;     // absent when TP + FN = 0
};

/// Indices of instances with occlusion_rate < delta_o (strict).
std::vector<std::size_t> select_interest(std::span<const GroundTruthInstance> gt,
                                         double delta_o = kDefaultOcclusionThreshold);

/// Mutual-nearest matching under the pose distance. With n_T(p) the nearest
/// instance of prediction p over all of T and n_P(t) the nearest prediction
/// of instance t, a pair (p, t) with t of interest is a true positive iff
/// d(p, t) < delta, t = n_T(p) and p = n_P(t). A prediction that is not
/// mutually matched is a false positive; an interest instance that is not is
/// a false negative. Ties in n_T go to the lower instance index; ties in n_P
/// go to the higher score, then the lower prediction index.
SceneEval match_scene(std::span<const ScoredPose> predictions,
                      std::span<const GroundTruthInstance> gt, const ObjectModel& object,
                      double delta, double delta_o = kDefaultOcclusionThreshold);

/// precision = TP/(TP+FP), recall = TP/(TP+FN).
PrecisionRecall precision_recall(const SceneEval& eval);

/// TP / min(n, TP+FN), for an evaluation run on at most n predictions.
std::optional<double> recall_limited(const SceneEval& eval, std::size_t n);

struct ScenePredictions {
  std::vector<ScoredPose> predictions;
  std::vector<GroundTruthInstance> ground_truth;
};

struct PrPoint {
  double threshold;
  double precision;
  double recall;
};

struct PrCurve {
  /// One point per distinct score threshold, by decreasing threshold. Points
  /// with undefined precision (nothing retained) are omitted.
  std::vector<PrPoint> points;
  double ap = 0.0;
};

struct CurveOptions {
  double delta = 0.0;  // length units
  double delta_o = kDefaultOcclusionThreshold;
  /// When set, each scene keeps its top-n predictions and recall is the
  /// limited-retrieval recall ΣTP / Σ min(n, |T_o|).
  std::optional<std::size_t> n_limit;
};

/// Keeps the predictions with score >= threshold, truncated to the top n by
/// score (stable) when n is given.
std::vector<ScoredPose> retained_predictions(std::span<const ScoredPose> predictions,
                                             double threshold,
                                             std::optional<std::size_t> n_limit);

/// Pooled-threshold precision/recall sweep across scenes with the area under
/// the curve: trapezoidal over recall on the points taken by increasing
/// recall (sweep order on ties), extended to recall 0 at the first point's
/// precision. An empty curve has AP 0. Throws on an empty dataset.
PrCurve pr_curve(std::span<const ScenePredictions> dataset, const ObjectModel& object,
                 const CurveOptions& options);

/// Trapezoidal area as used by pr_curve, exposed for reuse.
double area_under_curve(std::span<const PrPoint> points);

/// AP with at most n predictions per scene and limited-retrieval recall.
double ap_at_n(std::span<const ScenePredictions> dataset, const ObjectModel& object,
               double delta, double delta_o, std::size_t n);

/// Macro alternative: mean of per-scene AP over scenes with at least one
/// interest instance.
double per_scene_mean_ap(std::span<const ScenePredictions> dataset, const ObjectModel& object,
                         const CurveOptions& options);

}  // namespace posesym
