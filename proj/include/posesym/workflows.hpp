// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "posesym/defaults.hpp"
#include "posesym/eval_metrics.hpp"
#include "posesym/io.hpp"
#include "posesym/object_model.hpp"
#include "posesym/pnp.hpp"
#include "posesym/pose_space.hpp"
#include "posesym/scene_gen.hpp"

// File-level batch operations behind the command-line tool.
namespace posesym::workflows {

struct EvaluateConfig {
  double delta_fraction = kDefaultDeltaFraction;
  double delta_o = kDefaultOcclusionThreshold;
  std::vector<std::size_t> ap_limits{1, 3};
  bool per_scene_ap = false;
  io::PoseFrame frame = io::PoseFrame::centered;
};

struct EvaluateResult {
  nlohmann::json report;
  PrCurve curve;
  double ap = 0.0;
  std::vector<std::pair<std::size_t, double>> ap_at;
  std::optional<double> precision, recall;
};

/// Pairs gt_dir/<name>.json scene files with pred_dir/<name>.jsonl prediction
/// files. Unpaired names abort with a DataError listing them, except that a
/// prediction directory with no .jsonl files at all evaluates every scene
/// with zero predictions.
EvaluateResult evaluate(const ObjectModel& object, const std::filesystem::path& gt_dir,
                        const std::filesystem::path& pred_dir, const EvaluateConfig& config);

/// Report JSON plus the PR curve as CSV (threshold,precision,recall).
void write_evaluation(const EvaluateResult& result, const std::filesystem::path& report_path,
                      const std::filesystem::path& csv_path);

/// Duplicate filtering over a JSON-lines hypotheses file. Returns the number
/// of hypotheses kept.
std::size_t filter_file(const ObjectModel& object, const std::filesystem::path& in,
                        const std::filesystem::path& out, double radius, std::size_t keep,
                        io::PoseFrame frame = io::PoseFrame::centered);

/// Mean shift over a JSON-lines votes file; modes are written as JSON lines
/// with the density as score. Returns the number of modes.
std::size_t meanshift_file(const ObjectModel& object, const std::filesystem::path& in,
                           const std::filesystem::path& out, const MeanShiftParams& params,
                           io::PoseFrame frame = io::PoseFrame::centered);

struct AnnotateSummary {
  std::size_t solved = 0;
  std::size_t failed = 0;
};

/// Solves every instance of a correspondence file. Instances whose RMS
/// residual exceeds options.max_rms are discarded from the output scene and
/// listed under "failed_instances".
AnnotateSummary annotate_file(const std::filesystem::path& correspondences,
                              const std::filesystem::path& out_scene,
                              const PnpOptions& options);

struct GenerateConfig {
  std::size_t scene_count = 1;
  std::size_t instances = 10;
  std::uint64_t seed = 0;
  std::optional<Box> bin;
  ImageSize image_size;
  double depth_scale = 1e-4;
};

/// Default bin: square footprint of side (2√n + 2)·D and height 2D, where D
/// is the object diameter, with the floor at z = 0.
Box default_bin(const ObjectModel& object, std::size_t instances);

/// Writes scene_<k>.json with occlusion-annotated instances plus
/// scene_<k>_depth.pgm and scene_<k>_ids.pgm for k < scene_count. Instances
/// are listed by increasing occlusion rate.
void generate_scenes(const ObjectModel& object, const std::filesystem::path& out_dir,
                     const GenerateConfig& config);

/// Recomputes occlusion rates of a scene file that carries a camera and
/// writes the updated scene plus its depth and id images next to it.
void occlusion_file(const ObjectModel& object, const std::filesystem::path& scene_in,
                    const std::filesystem::path& scene_out,
                    io::PoseFrame frame = io::PoseFrame::centered);

}  // namespace posesym::workflows
