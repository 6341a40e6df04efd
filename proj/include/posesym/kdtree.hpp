// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace posesym {

/// Squared Euclidean distance between two `dim`-dimensional points. Every
/// exact comparison in the library goes through this one routine so that
/// indexed and linear-scan results agree bit for bit.
inline double squared_point_distance(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

/// Exact kD-tree over a flat point store. Splits on the widest dimension at
/// the median; leaves hold up to `leaf_size` points. Results are exact, with
/// distance ties resolved by lowest point index.
class KdTree {
 public:
  struct Hit {
    std::size_t index;
    double squared_distance;
  };

  KdTree() = default;
  /// `coords` holds points contiguously, `dim` values each. Copied.
  KdTree(std::span<const double> coords, int dim, int leaf_size = 32);

  int dim() const { return dim_; }
  std::size_t size() const { return count_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }

  /// Nearest point; the tree must be nonempty.
  Hit nearest(std::span<const double> query) const;

  /// Calls `visit(index, squared_distance)` for every point with squared
  /// distance <= `max_squared`, in no particular order.
  template <typename Visitor>
  void for_each_within(std::span<const double> query, double max_squared,
                       Visitor&& visit) const;

  /// Points with squared distance <= `max_squared`, sorted by (distance, index).
  std::vector<Hit> within(std::span<const double> query, double max_squared) const;

 private:
  struct Node {
    // Leaf: [begin, end) into order_. Inner: children and split.
    std::uint32_t begin = 0, end = 0;
    std::int32_t left = -1, right = -1;
    int split_dim = 0;
    double split_value = 0.0;
    // Bounding box, used for pruning.
    std::uint32_t box_offset = 0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  double box_squared_distance(const Node& n, const double* q) const;
  void nearest_rec(std::int32_t node, const double* q, Hit& best) const;

  int dim_ = 0;
  int leaf_size_ = 32;
  std::size_t count_ = 0;
  std::vector<double> coords_;
  // Points permuted into tree order for locality; order_[i] is the original index.
  std::vector<double> sorted_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::vector<double> boxes_;  // per node: dim mins then dim maxs
};

template <typename Visitor>
void KdTree::for_each_within(std::span<const double> query, double max_squared,
                             Visitor&& visit) const {
  if (nodes_.empty()) return;
  const double* q = query.data();
  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (box_squared_distance(n, q) > max_squared) continue;
    if (n.left < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const double d = squared_point_distance(sorted_.data() + std::size_t(i) * dim_, q, dim_);
        if (d <= max_squared) visit(static_cast<std::size_t>(order_[i]), d);
      }
      continue;
    }
    stack[top++] = n.left;
    stack[top++] = n.right;
  }
}

}  // namespace posesym
