// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "posesym/eval_metrics.hpp"
#include "posesym/object_model.hpp"
#include "posesym/pnp.hpp"
#include "posesym/pose.hpp"

namespace posesym {

struct Box {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d max = Eigen::Vector3d::Zero();
};

struct SceneSpec {
  std::size_t instance_count = 1;
  Box bin;
  std::uint64_t rng_seed = 0;
  /// Placement attempts per instance before giving up.
  int max_attempts = 10000;
};

/// Collision-free bulk placement: uniform rotations, translations uniform in
/// the bin, rejecting any enclosing sphere (radius = diameter/2 around the
/// surface centroid) that intersects a wall or an earlier sphere. A fixture
/// substitute for a physically settled pile. Deterministic given the seed.
/// Throws DataError if an instance cannot be placed.
std::vector<Pose> sample_scene(const SceneSpec& spec, const ObjectModel& object);

struct ImageSize {
  int width = 640;
  int height = 480;
};

/// Camera looking straight down (−z) at the bin center from far enough
/// above that the whole bin footprint is in view.
CameraModel top_view_camera(const Box& bin, ImageSize size = {}, double focal = 500.0);

inline constexpr std::int32_t kNoInstance = -1;

struct DepthImage {
  int width = 0;
  int height = 0;
  /// Camera-frame z per pixel, 0 where empty.
  std::vector<double> depth;
  /// Instance index per pixel, kNoInstance where empty.
  std::vector<std::int32_t> instance_id;

  double depth_at(int x, int y) const { return depth[std::size_t(y) * width + x]; }
  std::int32_t id_at(int x, int y) const { return instance_id[std::size_t(y) * width + x]; }
};

/// Z-buffer rasterization of all instances (no back-face culling, no
/// antialiasing). A pixel is covered when its center lies inside a projected
/// triangle; depth is interpolated perspective-correctly. Triangles with a
/// vertex at or behind the near plane are skipped. Instance ids are indices
/// into `poses`; depth ties keep the lower id.
DepthImage render_depth(std::span<const Pose> poses, const ObjectModel& object,
                        const CameraModel& cam, ImageSize size = {});

/// Per-instance occlusion rate o = 1 − |B|/|A|, where A counts the pixels the
/// instance covers when rendered alone and B those where it wins the
/// full-scene depth test. o = 1 when A is empty.
std::vector<double> occlusion_rates(std::span<const Pose> poses, const ObjectModel& object,
                                    const CameraModel& cam, ImageSize size = {});

}  // namespace posesym
