// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#include "posesym/scene_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "posesym/error.hpp"

namespace posesym {

std::vector<Pose> sample_scene(const SceneSpec& spec, const ObjectModel& object) {
  const double radius = 0.5 * object.diameter();
  const Eigen::Vector3d lo = spec.bin.min.array() + radius;
  const Eigen::Vector3d hi = spec.bin.max.array() - radius;
  if ((hi.array() < lo.array()).any()) {
    throw DataError("bin is too small to contain one enclosing sphere");
  }
  SplitMix64 rng(spec.rng_seed);
  std::vector<Pose> poses;
  poses.reserve(spec.instance_count);
  const double min_sep_sq = object.diameter() * object.diameter();
  for (std::size_t i = 0; i < spec.instance_count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < spec.max_attempts && !placed; ++attempt) {
      Pose p;
      p.rotation = rng.rotation();
      for (int k = 0; k < 3; ++k) p.translation[k] = rng.uniform(lo[k], hi[k]);
      const bool clear = std::all_of(poses.begin(), poses.end(), [&](const Pose& q) {
        return (q.translation - p.translation).squaredNorm() >= min_sep_sq;
      });
      if (clear) {
        poses.push_back(p);
        placed = true;
      }
    }
    if (!placed) {
      throw DataError("cannot place instance " + std::to_string(i + 1) + " of " +
                      std::to_string(spec.instance_count) + " after " +
                      std::to_string(spec.max_attempts) + " attempts");
    }
  }
  return poses;
}

CameraModel top_view_camera(const Box& bin, ImageSize size, double focal) {
  const Eigen::Vector3d center = 0.5 * (bin.min + bin.max);
  const Eigen::Vector3d half = 0.5 * (bin.max - bin.min);
  // Distance from the bin top so the footprint fits with a 10% margin.
  const double fit = 1.1 * std::max(half.x() * focal / (0.5 * size.width),
                                    half.y() * focal / (0.5 * size.height));
  const Eigen::Vector3d eye(center.x(), center.y(), bin.max.z() + fit);
  CameraModel cam;
  cam.intrinsics << focal, 0.0, 0.5 * size.width, 0.0, focal, 0.5 * size.height, 0.0, 0.0, 1.0;
  // Camera axes: x along world x, y along world −y, z (viewing) along world −z.
  cam.extrinsics.rotation = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
  cam.extrinsics.translation = -(cam.extrinsics.rotation * eye);
  return cam;
}

namespace {

constexpr double kNear = 1e-9;

void check_size(ImageSize size) {
  if (size.width <= 0 || size.height <= 0) throw UsageError("zero-size image");
}

double edge(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double px, double py) {
  return (b.x() - a.x()) * (py - a.y()) - (b.y() - a.y()) * (px - a.x());
}

void rasterize_instance(const Pose& pose, std::int32_t id, const ObjectModel& object,
                        const CameraModel& cam, DepthImage& img) {
  const auto& mesh = object.mesh();
  std::vector<Eigen::Vector3d> cam_pts(mesh.vertices.size());
  for (std::size_t i = 0; i < cam_pts.size(); ++i) {
    cam_pts[i] = cam.extrinsics.apply(pose.apply(mesh.vertices[i]));
  }
  for (const auto& tri : mesh.triangles) {
    const Eigen::Vector3d& a = cam_pts[tri[0]];
    const Eigen::Vector3d& b = cam_pts[tri[1]];
    const Eigen::Vector3d& c = cam_pts[tri[2]];
    if (a.z() <= kNear || b.z() <= kNear || c.z() <= kNear) continue;
    const Eigen::Vector2d pa = cam.project(a), pb = cam.project(b), pc = cam.project(c);
    const double area = edge(pa, pb, pc.x(), pc.y());
    if (area == 0.0 || !std::isfinite(area)) continue;
    const double xmin = std::min({pa.x(), pb.x(), pc.x()});
    const double xmax = std::max({pa.x(), pb.x(), pc.x()});
    const double ymin = std::min({pa.y(), pb.y(), pc.y()});
    const double ymax = std::max({pa.y(), pb.y(), pc.y()});
    // Pixel (x, y) has its center at (x + 0.5, y + 0.5).
    const int x0 = std::max(0, static_cast<int>(std::ceil(xmin - 0.5)));
    const int x1 = std::min(img.width - 1, static_cast<int>(std::floor(xmax - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(ymin - 0.5)));
    const int y1 = std::min(img.height - 1, static_cast<int>(std::floor(ymax - 0.5)));
    const double inv_za = 1.0 / a.z(), inv_zb = 1.0 / b.z(), inv_zc = 1.0 / c.z();
    for (int y = y0; y <= y1; ++y) {
      const double py = y + 0.5;
      for (int x = x0; x <= x1; ++x) {
        const double px = x + 0.5;
        const double w0 = edge(pb, pc, px, py) / area;
        const double w1 = edge(pc, pa, px, py) / area;
        const double w2 = edge(pa, pb, px, py) / area;
        if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
        // 1/z is affine in screen space.
        const double z = 1.0 / (w0 * inv_za + w1 * inv_zb + w2 * inv_zc);
        const std::size_t k = std::size_t(y) * img.width + x;
        const std::int32_t cur = img.instance_id[k];
        if (cur == kNoInstance || z < img.depth[k] || (z == img.depth[k] && id < cur)) {
          img.depth[k] = z;
          img.instance_id[k] = id;
        }
      }
    }
  }
}

DepthImage blank(ImageSize size) {
  DepthImage img;
  img.width = size.width;
  img.height = size.height;
  img.depth.assign(std::size_t(size.width) * size.height, 0.0);
  img.instance_id.assign(img.depth.size(), kNoInstance);
  return img;
}

}  // namespace

DepthImage render_depth(std::span<const Pose> poses, const ObjectModel& object,
                        const CameraModel& cam, ImageSize size) {
  check_size(size);
  DepthImage img = blank(size);
  for (std::size_t i = 0; i < poses.size(); ++i) {
    rasterize_instance(poses[i], static_cast<std::int32_t>(i), object, cam, img);
  }
  return img;
}

std::vector<double> occlusion_rates(std::span<const Pose> poses, const ObjectModel& object,
                                    const CameraModel& cam, ImageSize size) {
  check_size(size);
  const DepthImage scene = render_depth(poses, object, cam, size);
  std::vector<std::size_t> visible(poses.size(), 0);
  for (std::int32_t id : scene.instance_id) {
    if (id != kNoInstance) ++visible[id];
  }
  std::vector<double> out(poses.size(), 1.0);
  for (std::size_t i = 0; i < poses.size(); ++i) {
    DepthImage alone = blank(size);
    rasterize_instance(poses[i], static_cast<std::int32_t>(i), object, cam, alone);
    const auto covered = static_cast<std::size_t>(
        std::count_if(alone.instance_id.begin(), alone.instance_id.end(),
                      [](std::int32_t id) { return id != kNoInstance; }));
    if (covered > 0) {
      out[i] = 1.0 - static_cast<double>(visible[i]) / static_cast<double>(covered);
    }
  }
  return out;
}

}  // namespace posesym
