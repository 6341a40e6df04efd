// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "posesym/eval_metrics.hpp"
#include "posesym/object_model.hpp"
#include "posesym/pnp.hpp"
#include "posesym/pose.hpp"
#include "posesym/pose_space.hpp"
#include "posesym/scene_gen.hpp"

namespace posesym::io {

using nlohmann::json;

// Poses serialize as 9 row-major rotation entries plus 3 translation entries,
// either as a flat JSON/CSV row of 12 numbers or as {"R": [9], "t": [3]}.
// Numbers are written with round-trip precision (17 significant digits).

/// Accepts a 12-element array or an object with "R" and "t". The rotation
/// must satisfy the pose invariants within 1e-6; it is then re-projected.
Pose pose_from_json(const json& j);
json pose_to_json(const Pose& p);

/// Pose file: JSON (either form above) or a CSV line of 12 numbers; a
/// non-numeric header line is skipped.
Pose read_pose_file(const std::filesystem::path& path);
std::string pose_csv_row(const Pose& p);

/// How poses in input files relate to the object frame.
enum class PoseFrame {
  centered,  // object frame at the surface centroid (the library's frame)
  original,  // the mesh file's own frame
};

/// Converts a pose expressed for the original mesh frame into the centered
/// frame: x_orig = x_c + c gives T_c = (R, R c + t).
Pose to_centered_frame(const Pose& p, const ObjectModel& object, PoseFrame frame);

// Scored poses: JSON lines {"R": [9], "t": [3], "score": s, "id": ...}.
ScoredPose scored_pose_from_json(const json& j, std::size_t line_no);
json scored_pose_to_json(const ScoredPose& p);
std::vector<ScoredPose> read_scored_poses(const std::filesystem::path& path);
void write_scored_poses(const std::filesystem::path& path, const std::vector<ScoredPose>& poses);

json camera_to_json(const CameraModel& cam);
CameraModel camera_from_json(const json& j);

/// Ground-truth scene file.
struct SceneFile {
  std::optional<CameraModel> camera;
  std::optional<Box> bin;
  ImageSize image_size;
  std::vector<GroundTruthInstance> instances;
  /// Extra per-instance fields kept on round trip (e.g. "rms_residual").
  std::vector<json> instance_extras;
  std::string depth_image;     // relative path or empty
  std::string instance_image;  // relative path or empty
  double depth_scale = 1e-4;   // length units per depth count
  json extra = json::object();  // other top-level members, preserved
};

SceneFile read_scene(const std::filesystem::path& path);
void write_scene(const std::filesystem::path& path, const SceneFile& scene);

/// 16-bit binary PGM (P5, maxval 65535, big-endian samples).
void write_pgm16(const std::filesystem::path& path, int width, int height,
                 const std::vector<std::uint16_t>& pixels);
std::vector<std::uint16_t> read_pgm16(const std::filesystem::path& path, int& width,
                                      int& height);

/// Depth as round(z / scale) clamped to 65535, 0 where empty; ids as index + 1.
void write_depth_images(const DepthImage& img, double depth_scale,
                        const std::filesystem::path& depth_path,
                        const std::filesystem::path& id_path);

struct AnnotationInstance {
  std::string id;
  CorrespondenceSet correspondences;
  std::optional<Pose> init;
};

/// Correspondence file:
/// { "cameras": [{"K": [9], "R": [9], "t": [3]}, ...],
///   "instances": [{"id": "a", "views": [{"camera": 0,
///       "points": [{"X": [3], "p": [2]}, ...]}, ...], "init": pose?}, ...] }
struct CorrespondenceFile {
  std::vector<CameraModel> cameras;
  std::vector<AnnotationInstance> instances;
};

CorrespondenceFile read_correspondences(const std::filesystem::path& path);
void write_correspondences(const std::filesystem::path& path, const CorrespondenceFile& file);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace posesym::io
