// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "posesym/kdtree.hpp"
#include "posesym/object_model.hpp"
#include "posesym/pose.hpp"

namespace posesym {

struct PoseHit {
  std::size_t pose_id;
  double distance;
  /// Index (within the pose's representative set) of the closest point.
  std::size_t representative;
};

/// Exact nearest-neighbor and radius queries under the pose distance. Every
/// pose contributes all of its representative points; results are reduced
/// per pose by taking the minimum point distance. Pose ids are positions in
/// the input list. Immutable after construction; concurrent queries are safe.
class PoseIndex {
 public:
  /// Throws UsageError on an empty pose list.
  PoseIndex(std::span<const Pose> poses, const ObjectModel& object, int leaf_size = 32);

  std::size_t size() const { return pose_count_; }
  std::size_t point_count() const { return tree_.size(); }
  int dim() const { return tree_.dim(); }
  const ObjectModel& object() const { return *object_; }

  /// Representative point `r` of pose `id`.
  std::span<const double> representative(std::size_t id, std::size_t r) const {
    return tree_.point(id * reps_per_pose_ + r);
  }

  /// Exact minimizer of the pose distance; ties broken by lowest pose id.
  PoseHit nearest(const Pose& query) const;

  /// All poses with distance <= radius, sorted by (distance, pose id).
  std::vector<PoseHit> radius_search(const Pose& query, double radius) const;

 private:
  const ObjectModel* object_;
  std::size_t pose_count_ = 0;
  std::size_t reps_per_pose_ = 1;
  KdTree tree_;
};

}  // namespace posesym
