// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#include "posesym/eval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "posesym/error.hpp"
#include "posesym/pose_metric.hpp"

namespace posesym {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Pairwise prediction × instance distances of one scene, computed once and
// reused across score thresholds.
struct DistanceTable {
  std::size_t rows = 0, cols = 0;
  std::vector<double> d;
  double operator()(std::size_t p, std::size_t t) const { return d[p * cols + t]; }
};

DistanceTable distance_table(std::span<const ScoredPose> predictions,
                             std::span<const GroundTruthInstance> gt,
                             const ObjectModel& object) {
  DistanceTable table{predictions.size(), gt.size(), {}};
  table.d.resize(table.rows * table.cols);
  for (std::size_t p = 0; p < table.rows; ++p)
    for (std::size_t t = 0; t < table.cols; ++t)
      table.d[p * table.cols + t] = distance(predictions[p].pose, gt[t].pose, object);
  return table;
}

// Matches the predictions listed in `active` (indices into the table rows).
// Output ids are table indices.
SceneEval match_active(const DistanceTable& table, std::span<const ScoredPose> predictions,
                       std::span<const std::size_t> active,
                       std::span<const GroundTruthInstance> gt, double delta, double delta_o) {
  SceneEval out;
  std::vector<std::size_t> nearest_gt(table.rows, kNone);
  std::vector<std::size_t> nearest_pred(table.cols, kNone);

  for (std::size_t p : active) {
    for (std::size_t t = 0; t < table.cols; ++t) {
      if (nearest_gt[p] == kNone || table(p, t) < table(p, nearest_gt[p])) nearest_gt[p] = t;
    }
  }
  for (std::size_t t = 0; t < table.cols; ++t) {
    for (std::size_t p : active) {
      const std::size_t cur = nearest_pred[t];
      if (cur == kNone) {
        nearest_pred[t] = p;
        continue;
      }
      const double dp = table(p, t), dc = table(cur, t);
      if (dp < dc || (dp == dc && (predictions[p].score > predictions[cur].score ||
                                   (predictions[p].score == predictions[cur].score && p < cur)))) {
        nearest_pred[t] = p;
      }
    }
  }

  for (std::size_t p : active) {
    const std::size_t t = nearest_gt[p];
    const bool matched = t != kNone && table(p, t) < delta && nearest_pred[t] == p;
    if (!matched) {
      out.false_positives.push_back(p);
    } else if (gt[t].occlusion_rate < delta_o) {
      out.true_positives.emplace_back(p, t);
    } else {
      ++out.uninteresting_matches;
    }
  }
  for (std::size_t t = 0; t < table.cols; ++t) {
    if (!(gt[t].occlusion_rate < delta_o)) continue;
    const std::size_t p = nearest_pred[t];
    const bool matched = p != kNone && table(p, t) < delta && nearest_gt[p] == t;
    if (!matched) out.false_negatives.push_back(t);
  }
  std::sort(out.false_positives.begin(), out.false_positives.end());
  std::sort(out.true_positives.begin(), out.true_positives.end());
  return out;
}

void check_thresholds(double delta, double delta_o) {
  if (!(delta > 0.0)) throw UsageError("match threshold delta must be > 0");
  if (!(delta_o > 0.0 && delta_o <= 1.0)) throw UsageError("delta_o must be in (0, 1]");
}

void check_ground_truth(std::span<const GroundTruthInstance> gt) {
  for (const auto& g : gt) {
    if (!(g.occlusion_rate >= 0.0 && g.occlusion_rate <= 1.0)) {
      throw DataError("occlusion rate outside [0, 1]");
    }
  }
}

std::vector<std::size_t> active_indices(std::span<const ScoredPose> predictions,
                                        double threshold, std::optional<std::size_t> n_limit) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].score >= threshold) idx.push_back(i);
  }
  if (n_limit && idx.size() > *n_limit) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return predictions[a].score > predictions[b].score;
    });
    idx.resize(*n_limit);
    std::sort(idx.begin(), idx.end());
  }
  return idx;
}

}  // namespace

std::vector<std::size_t> select_interest(std::span<const GroundTruthInstance> gt,
                                         double delta_o) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i].occlusion_rate < delta_o) out.push_back(i);
  }
  return out;
}

SceneEval match_scene(std::span<const ScoredPose> predictions,
                      std::span<const GroundTruthInstance> gt, const ObjectModel& object,
                      double delta, double delta_o) {
  check_thresholds(delta, delta_o);
  check_ground_truth(gt);
  const DistanceTable table = distance_table(predictions, gt, object);
  std::vector<std::size_t> all(predictions.size());
  std::iota(all.begin(), all.end(), 0);
  return match_active(table, predictions, all, gt, delta, delta_o);
}

PrecisionRecall precision_recall(const SceneEval& eval) {
  PrecisionRecall pr;
  const double tp = static_cast<double>(eval.tp());
  if (eval.tp() + eval.fp() > 0) pr.precision = tp / static_cast<double>(eval.tp() + eval.fp());
  if (eval.tp() + eval.fn() > 0) pr.recall = tp / static_cast<double>(eval.tp() + eval.fn());
  return pr;
}

std::optional<double> recall_limited(const SceneEval& eval, std::size_t n) {
  if (n < 1) throw UsageError("retrieval limit n must be >= 1");
  const std::size_t denom = std::min(n, eval.tp() + eval.fn());
  if (denom == 0) return std::nullopt;
  return static_cast<double>(eval.tp()) / static_cast<double>(denom);
}

std::vector<ScoredPose> retained_predictions(std::span<const ScoredPose> predictions,
                                             double threshold,
                                             std::optional<std::size_t> n_limit) {
  std::vector<ScoredPose> out;
  for (std::size_t i : active_indices(predictions, threshold, n_limit)) {
    out.push_back(predictions[i]);
  }
  return out;
}

double area_under_curve(std::span<const PrPoint> points) {
  if (points.empty()) return 0.0;
  std::vector<PrPoint> sorted(points.begin(), points.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const PrPoint& a, const PrPoint& b) { return a.recall < b.recall; });
  double area = 0.0;
  double prev_r = 0.0, prev_p = sorted.front().precision;
  for (const auto& pt : sorted) {
    area += (pt.recall - prev_r) * 0.5 * (pt.precision + prev_p);
    prev_r = pt.recall;
    prev_p = pt.precision;
  }
  return area;
}

PrCurve pr_curve(std::span<const ScenePredictions> dataset, const ObjectModel& object,
                 const CurveOptions& options) {
  if (dataset.empty()) throw UsageError("empty dataset");
  check_thresholds(options.delta, options.delta_o);
  if (options.n_limit && *options.n_limit < 1) throw UsageError("n_limit must be >= 1");

  std::vector<DistanceTable> tables;
  tables.reserve(dataset.size());
  std::vector<double> scores;
  for (const auto& scene : dataset) {
    check_ground_truth(scene.ground_truth);
    for (const auto& p : scene.predictions) {
      if (!std::isfinite(p.score)) throw DataError("prediction score is not finite");
      scores.push_back(p.score);
    }
    tables.push_back(distance_table(scene.predictions, scene.ground_truth, object));
  }
  std::sort(scores.begin(), scores.end(), std::greater<>());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());

  PrCurve curve;
  for (double threshold : scores) {
    std::size_t tp = 0, fp = 0, recall_denom = 0;
    for (std::size_t s = 0; s < dataset.size(); ++s) {
      const auto& scene = dataset[s];
      const auto active = active_indices(scene.predictions, threshold, options.n_limit);
      const SceneEval e = match_active(tables[s], scene.predictions, active,
                                       scene.ground_truth, options.delta, options.delta_o);
      tp += e.tp();
      fp += e.fp();
      const std::size_t interest = e.tp() + e.fn();
      recall_denom += options.n_limit ? std::min(*options.n_limit, interest) : interest;
    }
    if (tp + fp == 0 || recall_denom == 0) continue;
    curve.points.push_back({threshold, static_cast<double>(tp) / static_cast<double>(tp + fp),
                            static_cast<double>(tp) / static_cast<double>(recall_denom)});
  }
  curve.ap = area_under_curve(curve.points);
  return curve;
}

double ap_at_n(std::span<const ScenePredictions> dataset, const ObjectModel& object,
               double delta, double delta_o, std::size_t n) {
  return pr_curve(dataset, object, {delta, delta_o, n}).ap;
}

double per_scene_mean_ap(std::span<const ScenePredictions> dataset, const ObjectModel& object,
                         const CurveOptions& options) {
  if (dataset.empty()) throw UsageError("empty dataset");
  double acc = 0.0;
  std::size_t counted = 0;
  for (const auto& scene : dataset) {
    if (select_interest(scene.ground_truth, options.delta_o).empty()) continue;
    acc += pr_curve(std::span(&scene, 1), object, options).ap;
    ++counted;
  }
  return counted == 0 ? 0.0 : acc / static_cast<double>(counted);
}

}  // namespace posesym
