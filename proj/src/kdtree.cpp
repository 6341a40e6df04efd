// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#include "posesym/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "posesym/error.hpp"

namespace posesym {

KdTree::KdTree(std::span<const double> coords, int dim, int leaf_size)
    : dim_(dim), leaf_size_(std::max(1, leaf_size)) {
  if (dim <= 0 || coords.size() % static_cast<std::size_t>(dim) != 0) {
    throw UsageError("kd-tree: coordinate count is not a multiple of the dimension");
  }
  count_ = coords.size() / dim;
  if (count_ > std::numeric_limits<std::uint32_t>::max()) {
    throw UsageError("kd-tree: too many points");
  }
  coords_.assign(coords.begin(), coords.end());
  order_.resize(count_);
  std::iota(order_.begin(), order_.end(), 0u);
  if (count_ == 0) return;
  build(0, static_cast<std::uint32_t>(count_));

  sorted_.resize(coords_.size());
  for (std::size_t i = 0; i < count_; ++i) {
    std::copy_n(coords_.data() + std::size_t(order_[i]) * dim_, dim_,
                sorted_.data() + i * dim_);
  }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  const auto box = static_cast<std::uint32_t>(boxes_.size());
  boxes_.resize(boxes_.size() + 2 * dim_);
  {
    double* lo = boxes_.data() + box;
    double* hi = lo + dim_;
    std::fill(lo, lo + dim_, std::numeric_limits<double>::infinity());
    std::fill(hi, hi + dim_, -std::numeric_limits<double>::infinity());
    for (std::uint32_t i = begin; i < end; ++i) {
      const double* p = coords_.data() + std::size_t(order_[i]) * dim_;
      for (int k = 0; k < dim_; ++k) {
        lo[k] = std::min(lo[k], p[k]);
        hi[k] = std::max(hi[k], p[k]);
      }
    }
  }
  Node node;
  node.begin = begin;
  node.end = end;
  node.box_offset = box;

  if (end - begin > static_cast<std::uint32_t>(leaf_size_)) {
    const double* lo = boxes_.data() + box;
    const double* hi = lo + dim_;
    int split = 0;
    for (int k = 1; k < dim_; ++k) {
      if (hi[k] - lo[k] > hi[split] - lo[split]) split = k;
    }
    if (hi[split] > lo[split]) {
      const std::uint32_t mid = begin + (end - begin) / 2;
      std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                       [&](std::uint32_t a, std::uint32_t b) {
                         return coords_[std::size_t(a) * dim_ + split] <
                                coords_[std::size_t(b) * dim_ + split];
                       });
      node.split_dim = split;
      node.split_value = coords_[std::size_t(order_[mid]) * dim_ + split];
      const std::int32_t left = build(begin, mid);
      const std::int32_t right = build(mid, end);
      node.left = left;
      node.right = right;
    }
  }
  nodes_[id] = node;
  return id;
}

double KdTree::box_squared_distance(const Node& n, const double* q) const {
  const double* lo = boxes_.data() + n.box_offset;
  const double* hi = lo + dim_;
  double s = 0.0;
  for (int k = 0; k < dim_; ++k) {
    double d = 0.0;
    if (q[k] < lo[k]) d = lo[k] - q[k];
    else if (q[k] > hi[k]) d = q[k] - hi[k];
    s += d * d;
  }
  return s;
}

void KdTree::nearest_rec(std::int32_t id, const double* q, Hit& best) const {
  const Node& n = nodes_[id];
  if (n.left < 0) {
    for (std::uint32_t i = n.begin; i < n.end; ++i) {
      const double d = squared_point_distance(sorted_.data() + std::size_t(i) * dim_, q, dim_);
      const std::size_t idx = order_[i];
      if (d < best.squared_distance || (d == best.squared_distance && idx < best.index)) {
        best = {idx, d};
      }
    }
    return;
  }
  std::int32_t first = n.left, second = n.right;
  if (q[n.split_dim] >= n.split_value) std::swap(first, second);
  // Box distances are lower bounds; a tie with the current best may still
  // hold a lower index, so only strictly farther boxes are pruned.
  if (box_squared_distance(nodes_[first], q) <= best.squared_distance) {
    nearest_rec(first, q, best);
  }
  if (box_squared_distance(nodes_[second], q) <= best.squared_distance) {
    nearest_rec(second, q, best);
  }
}

KdTree::Hit KdTree::nearest(std::span<const double> query) const {
  if (count_ == 0) throw UsageError("kd-tree: nearest query on an empty tree");
  Hit best{std::numeric_limits<std::size_t>::max(), std::numeric_limits<double>::infinity()};
  nearest_rec(0, query.data(), best);
  return best;
}

std::vector<KdTree::Hit> KdTree::within(std::span<const double> query,
                                        double max_squared) const {
  std::vector<Hit> out;
  for_each_within(query, max_squared,
                  [&](std::size_t i, double d) { out.push_back({i, d}); });
  std::sort(out.begin(), out.end(), [](const Hit& a, const Hit& b) {
    return a.squared_distance != b.squared_distance ? a.squared_distance < b.squared_distance
                                                    : a.index < b.index;
  });
  return out;
}

}  // namespace posesym
