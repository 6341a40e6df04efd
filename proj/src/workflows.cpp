// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#include "posesym/workflows.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "posesym/error.hpp"

namespace posesym::workflows {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::map<std::string, fs::path> files_by_stem(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      out.emplace(entry.path().stem().string(), entry.path());
    }
  }
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string scene_name(std::size_t k) {
  std::ostringstream os;
  os << "scene_";
  os.width(3);
  os.fill('0');
  os << k;
  return os.str();
}

}  // namespace

EvaluateResult evaluate(const ObjectModel& object, const fs::path& gt_dir,
                        const fs::path& pred_dir, const EvaluateConfig& config) {
  if (!(config.delta_fraction > 0.0 && config.delta_fraction <= 1.0)) {
    throw UsageError("delta fraction must be in (0, 1]");
  }
  if (!(config.delta_o > 0.0 && config.delta_o <= 1.0)) {
    throw UsageError("delta_o must be in (0, 1]");
  }
  const auto gt_files = files_by_stem(gt_dir, ".json");
  const auto pred_files = files_by_stem(pred_dir, ".jsonl");
  if (gt_files.empty()) throw DataError("no ground-truth scenes (*.json) in " + gt_dir.string());

  json warnings = json::array();
  if (pred_files.empty()) {
    warnings.push_back("prediction directory holds no .jsonl files; all scenes have zero predictions");
  } else {
    std::vector<std::string> missing;
    for (const auto& [name, _] : gt_files) {
      if (!pred_files.count(name)) missing.push_back("predictions for " + name);
    }
    for (const auto& [name, _] : pred_files) {
      if (!gt_files.count(name)) missing.push_back("ground truth for " + name);
    }
    if (!missing.empty()) {
      std::string msg = "unpaired scenes:";
      for (const auto& m : missing) msg += "\n  missing " + m;
      throw DataError(msg);
    }
  }

  std::vector<ScenePredictions> dataset;
  std::vector<std::string> names;
  for (const auto& [name, gt_path] : gt_files) {
    ScenePredictions scene;
    for (auto g : io::read_scene(gt_path).instances) {
      g.pose = io::to_centered_frame(g.pose, object, config.frame);
      scene.ground_truth.push_back(g);
    }
    if (!pred_files.empty()) {
      for (auto p : io::read_scored_poses(pred_files.at(name))) {
        p.pose = io::to_centered_frame(p.pose, object, config.frame);
        scene.predictions.push_back(std::move(p));
      }
    }
    dataset.push_back(std::move(scene));
    names.push_back(name);
  }

  const double delta = object.match_threshold(config.delta_fraction);
  EvaluateResult result;
  json scenes = json::array();
  std::size_t tp = 0, fp = 0, fn = 0, uninteresting = 0;
  for (std::size_t s = 0; s < dataset.size(); ++s) {
    const auto& scene = dataset[s];
    const SceneEval e = match_scene(scene.predictions, scene.ground_truth, object, delta,
                                    config.delta_o);
    const PrecisionRecall pr = precision_recall(e);
    json jtp = json::array(), jfp = json::array();
    for (const auto& [p, t] : e.true_positives) {
      jtp.push_back(json{{"prediction", scene.predictions[p].id}, {"ground_truth", t}});
    }
    for (std::size_t p : e.false_positives) jfp.push_back(scene.predictions[p].id);
    scenes.push_back(json{{"name", names[s]},
                          {"predictions", scene.predictions.size()},
                          {"ground_truth", scene.ground_truth.size()},
                          {"interest", select_interest(scene.ground_truth, config.delta_o).size()},
                          {"tp", jtp},
                          {"fp", jfp},
                          {"fn", e.false_negatives},
                          {"uninteresting_matches", e.uninteresting_matches},
                          {"precision", optional_number(pr.precision)},
                          {"recall", optional_number(pr.recall)}});
    tp += e.tp();
    fp += e.fp();
    fn += e.fn();
    uninteresting += e.uninteresting_matches;
  }
  if (tp + fp > 0) result.precision = double(tp) / double(tp + fp);
  if (tp + fn > 0) result.recall = double(tp) / double(tp + fn);

  result.curve = pr_curve(dataset, object, {delta, config.delta_o, std::nullopt});
  result.ap = result.curve.ap;
  json ap_at = json::object();
  json report{{"format_version", kFormatVersion},
              {"config",
               {{"delta", delta},
                {"delta_fraction", config.delta_fraction},
                {"delta_o", config.delta_o},
                {"diameter", object.diameter()},
                {"pose_frame", config.frame == io::PoseFrame::centered ? "centered" : "original"}}},
              {"scenes", scenes},
              {"totals",
               {{"tp", tp},
                {"fp", fp},
                {"fn", fn},
                {"uninteresting_matches", uninteresting},
                {"precision", optional_number(result.precision)},
                {"recall", optional_number(result.recall)}}},
              {"ap", result.ap}};
  for (std::size_t n : config.ap_limits) {
    const double v = ap_at_n(dataset, object, delta, config.delta_o, n);
    result.ap_at.emplace_back(n, v);
    ap_at[std::to_string(n)] = v;
    report["ap" + std::to_string(n)] = v;
  }
  report["ap_at"] = ap_at;
  if (config.per_scene_ap) {
    report["per_scene_ap"] =
        per_scene_mean_ap(dataset, object, {delta, config.delta_o, std::nullopt});
  }
  if (!warnings.empty()) report["warnings"] = warnings;
  result.report = std::move(report);
  return result;
}

void write_evaluation(const EvaluateResult& result, const fs::path& report_path,
                      const fs::path& csv_path) {
  if (!report_path.empty()) io::write_json_file(report_path, result.report);
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw DataError("cannot write " + csv_path.string());
    out.precision(17);
    out << "threshold,precision,recall\n";
    for (const auto& p : result.curve.points) {
      out << p.threshold << ',' << p.precision << ',' << p.recall << '\n';
    }
  }
}

std::size_t filter_file(const ObjectModel& object, const fs::path& in, const fs::path& out,
                        double radius, std::size_t keep, io::PoseFrame frame) {
  auto hyps = io::read_scored_poses(in);
  std::vector<ScoredPose> centered = hyps;
  for (auto& h : centered) h.pose = io::to_centered_frame(h.pose, object, frame);
  std::vector<ScoredPose> kept;
  // Written back unchanged, in the frame they came in.
  for (std::size_t i : filter_duplicate_indices(centered, object, radius, keep)) {
    kept.push_back(hyps[i]);
  }
  io::write_scored_poses(out, kept);
  return kept.size();
}

std::size_t meanshift_file(const ObjectModel& object, const fs::path& in, const fs::path& out,
                           const MeanShiftParams& params, io::PoseFrame frame) {
  auto votes = io::read_scored_poses(in);
  for (auto& v : votes) v.pose = io::to_centered_frame(v.pose, object, frame);
  const auto modes = mean_shift(votes, object, params);
  std::vector<ScoredPose> out_modes;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    out_modes.push_back({modes[k].pose, modes[k].density, "mode_" + std::to_string(k)});
  }
  io::write_scored_poses(out, out_modes);
  return out_modes.size();
}

AnnotateSummary annotate_file(const fs::path& correspondences, const fs::path& out_scene,
                              const PnpOptions& options) {
  const io::CorrespondenceFile file = io::read_correspondences(correspondences);
  io::SceneFile scene;
  if (!file.cameras.empty()) scene.camera = file.cameras.front();
  AnnotateSummary summary;
  json failed = json::array();
  for (const auto& inst : file.instances) {
    try {
      const PnpResult r =
          solve_multiview_pnp(inst.correspondences, file.cameras, inst.init, options);
      if (!r.converged) {
        failed.push_back(json{{"id", inst.id}, {"rms_residual", r.rms}, {"reason", "residual above threshold"}});
        ++summary.failed;
        continue;
      }
      scene.instances.push_back({r.pose, 0.0});
      scene.instance_extras.push_back(json{{"id", inst.id}, {"rms_residual", r.rms}});
      ++summary.solved;
    } catch (const Error& e) {
      failed.push_back(json{{"id", inst.id}, {"reason", e.what()}});
      ++summary.failed;
    }
  }
  scene.extra["failed_instances"] = failed;
  scene.extra["pose_frame"] = "centered";
  io::write_scene(out_scene, scene);
  return summary;
}

Box default_bin(const ObjectModel& object, std::size_t instances) {
  const double d = object.diameter();
  const double side = (2.0 * std::sqrt(static_cast<double>(instances)) + 2.0) * d;
  return {{-0.5 * side, -0.5 * side, 0.0}, {0.5 * side, 0.5 * side, 2.0 * d}};
}

void generate_scenes(const ObjectModel& object, const fs::path& out_dir,
                     const GenerateConfig& config) {
  if (config.scene_count < 1) throw UsageError("scene count must be >= 1");
  if (config.instances < 1) throw UsageError("instance count must be >= 1");
  fs::create_directories(out_dir);
  const Box bin = config.bin ? *config.bin : default_bin(object, config.instances);
  const CameraModel cam = top_view_camera(bin, config.image_size);
  SplitMix64 seeds(config.seed);
  for (std::size_t k = 0; k < config.scene_count; ++k) {
    SceneSpec spec;
    spec.instance_count = config.instances;
    spec.bin = bin;
    spec.rng_seed = seeds.next();
    const auto sampled = sample_scene(spec, object);
    const auto sampled_rates = occlusion_rates(sampled, object, cam, config.image_size);
    // List instances from most to least visible; ties keep placement order.
    std::vector<std::size_t> order(sampled.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return sampled_rates[a] < sampled_rates[b];
    });
    std::vector<Pose> poses;
    std::vector<double> rates;
    for (std::size_t i : order) {
      poses.push_back(sampled[i]);
      rates.push_back(sampled_rates[i]);
    }
    const DepthImage img = render_depth(poses, object, cam, config.image_size);

    const std::string name = scene_name(k);
    io::SceneFile scene;
    scene.camera = cam;
    scene.bin = bin;
    scene.image_size = config.image_size;
    scene.depth_scale = config.depth_scale;
    scene.depth_image = name + "_depth.pgm";
    scene.instance_image = name + "_ids.pgm";
    for (std::size_t i = 0; i < poses.size(); ++i) scene.instances.push_back({poses[i], rates[i]});
    scene.extra["seed"] = spec.rng_seed;
    scene.extra["pose_frame"] = "centered";
    io::write_depth_images(img, config.depth_scale, out_dir / scene.depth_image,
                           out_dir / scene.instance_image);
    io::write_scene(out_dir / (name + ".json"), scene);
  }
}

void occlusion_file(const ObjectModel& object, const fs::path& scene_in, const fs::path& scene_out,
                    io::PoseFrame frame) {
  io::SceneFile scene = io::read_scene(scene_in);
  if (!scene.camera) throw DataError(scene_in.string() + ": scene has no camera");
  std::vector<Pose> poses;
  for (auto& inst : scene.instances) {
    inst.pose = io::to_centered_frame(inst.pose, object, frame);
    poses.push_back(inst.pose);
  }
  const auto rates = occlusion_rates(poses, object, *scene.camera, scene.image_size);
  for (std::size_t i = 0; i < rates.size(); ++i) scene.instances[i].occlusion_rate = rates[i];
  const DepthImage img = render_depth(poses, object, *scene.camera, scene.image_size);
  const std::string stem = scene_out.stem().string();
  scene.depth_image = stem + "_depth.pgm";
  scene.instance_image = stem + "_ids.pgm";
  scene.extra["pose_frame"] = "centered";
  const fs::path dir = scene_out.parent_path().empty() ? fs::path(".") : scene_out.parent_path();
  io::write_depth_images(img, scene.depth_scale, dir / scene.depth_image,
                         dir / scene.instance_image);
  io::write_scene(scene_out, scene);
}

}  // namespace posesym::workflows
