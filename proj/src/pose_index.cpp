// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#include "posesym/pose_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "posesym/error.hpp"
#include "posesym/pose_metric.hpp"

namespace posesym {

namespace {

KdTree build_tree(std::span<const Pose> poses, const ObjectModel& object, int leaf_size) {
  if (poses.empty()) throw UsageError("cannot build a pose index from an empty pose list");
  std::vector<double> coords;
  coords.reserve(poses.size() * object.group().representative_count() *
                 representative_dim(object.symmetry_class()));
  for (const auto& p : poses) append_representatives(p, object, coords);
  return KdTree(coords, representative_dim(object.symmetry_class()), leaf_size);
}

}  // namespace

PoseIndex::PoseIndex(std::span<const Pose> poses, const ObjectModel& object, int leaf_size)
    : object_(&object),
      pose_count_(poses.size()),
      reps_per_pose_(object.group().representative_count()),
      tree_(build_tree(poses, object, leaf_size)) {}

PoseHit PoseIndex::nearest(const Pose& query) const {
  double q[12];
  first_representative(query, *object_, q);
  // Points are stored pose-major, so the lowest point index among equally
  // distant points belongs to the lowest pose id.
  const auto hit = tree_.nearest({q, static_cast<std::size_t>(tree_.dim())});
  return {hit.index / reps_per_pose_, std::sqrt(hit.squared_distance),
          hit.index % reps_per_pose_};
}

std::vector<PoseHit> PoseIndex::radius_search(const Pose& query, double radius) const {
  if (radius < 0.0 || std::isnan(radius)) throw UsageError("radius must be >= 0");
  double q[12];
  first_representative(query, *object_, q);
  // Slightly widened so the final sqrt-based test decides boundary cases the
  // same way a linear scan over distance() would.
  const double max_sq = std::isinf(radius) ? std::numeric_limits<double>::infinity()
                                           : radius * radius * (1.0 + 1e-12);
  // Keep the per-pose minimum over its representatives.
  std::unordered_map<std::size_t, std::pair<double, std::size_t>> best;
  tree_.for_each_within({q, static_cast<std::size_t>(tree_.dim())}, max_sq,
                        [&](std::size_t point, double d) {
                          const std::size_t id = point / reps_per_pose_;
                          const std::size_t rep = point % reps_per_pose_;
                          auto [it, inserted] = best.try_emplace(id, d, rep);
                          if (!inserted && (d < it->second.first ||
                                            (d == it->second.first && rep < it->second.second))) {
                            it->second = {d, rep};
                          }
                        });
  std::vector<PoseHit> out;
  out.reserve(best.size());
  for (const auto& [id, v] : best) {
    const double d = std::sqrt(v.first);
    if (d <= radius) out.push_back({id, d, v.second});
  }
  std::sort(out.begin(), out.end(), [](const PoseHit& a, const PoseHit& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.pose_id < b.pose_id;
  });
  return out;
}

}  // namespace posesym
