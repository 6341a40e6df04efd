// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors
//
// Command-line front end. Talks to the library only through posesym.h.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "posesym/posesym.h"

namespace {

// Exit codes mirror psym_status: 0 ok, 1 usage, 2 data, 3 numerical.
int report(psym_status st) {
  if (st == PSYM_OK) return 0;
  std::cerr << "error: " << psym_last_error() << "\n";
  return st == PSYM_ERR_INTERNAL ? 3 : static_cast<int>(st);
}

struct ObjectHandle {
  psym_object* ptr = nullptr;
  ~ObjectHandle() { psym_object_free(ptr); }
};

const std::map<std::string, psym_pose_frame> kFrames{{"centered", PSYM_FRAME_CENTERED},
                                                     {"original", PSYM_FRAME_ORIGINAL}};

std::string fmt(double v) {
  if (std::isnan(v)) return "undefined";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symmetry-aware pose distances and pose-estimation evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", psym_version());

  std::string object_path;
  double delta_fraction = 0.1;
  double delta_o = 0.5;
  psym_pose_frame frame = PSYM_FRAME_CENTERED;

  auto add_object = [&](CLI::App* sub) {
    sub->add_option("--object", object_path, "object descriptor JSON")->required()->check(CLI::ExistingFile);
  };
  auto add_frame = [&](CLI::App* sub) {
    sub->add_option("--pose-frame", frame, "frame of input poses: centered or original")
        ->transform(CLI::CheckedTransformer(kFrames, CLI::ignore_case));
  };
  auto add_delta_fraction = [&](CLI::App* sub) {
    sub->add_option("--delta-fraction", delta_fraction, "match threshold as a fraction of the diameter")
        ->check(CLI::Range(0.0, 1.0));
  };

  // distance
  std::string pose_a, pose_b;
  auto* c_dist = app.add_subcommand("distance", "distance between two poses, with ADI for comparison");
  add_object(c_dist);
  c_dist->add_option("pose_a", pose_a, "pose file (JSON or CSV)")->required()->check(CLI::ExistingFile);
  c_dist->add_option("pose_b", pose_b, "pose file (JSON or CSV)")->required()->check(CLI::ExistingFile);
  add_delta_fraction(c_dist);
  add_frame(c_dist);

  // evaluate
  std::string gt_dir, pred_dir, report_path = "report.json", csv_path = "pr.csv";
  bool per_scene_ap = false;
  auto* c_eval = app.add_subcommand("evaluate", "match predictions against ground truth, write report and PR curve");
  add_object(c_eval);
  c_eval->add_option("--gt", gt_dir, "directory of ground-truth scene files (*.json)")->required()->check(CLI::ExistingDirectory);
  c_eval->add_option("--pred", pred_dir, "directory of prediction files (*.jsonl)")->required()->check(CLI::ExistingDirectory);
  c_eval->add_option("--report", report_path, "report JSON output")->capture_default_str();
  c_eval->add_option("--csv", csv_path, "PR curve CSV output")->capture_default_str();
  add_delta_fraction(c_eval);
  c_eval->add_option("--delta-o", delta_o, "occlusion threshold for instances of interest")->check(CLI::Range(0.0, 1.0));
  c_eval->add_flag("--per-scene-ap", per_scene_ap, "also report AP averaged over scenes");
  add_frame(c_eval);

  // filter
  std::string in_path, out_path;
  std::optional<double> radius;
  std::size_t keep = 20;
  auto* c_filter = app.add_subcommand("filter", "drop hypotheses within a radius of a better one");
  add_object(c_filter);
  c_filter->add_option("--in", in_path, "hypotheses (JSON lines)")->required()->check(CLI::ExistingFile);
  c_filter->add_option("--out", out_path, "retained hypotheses (JSON lines)")->required();
  c_filter->add_option("--radius", radius, "suppression radius (default: delta)")->check(CLI::PositiveNumber);
  c_filter->add_option("--keep", keep, "maximum hypotheses kept")->capture_default_str()->check(CLI::PositiveNumber);
  add_delta_fraction(c_filter);
  add_frame(c_filter);

  // meanshift
  std::optional<double> bandwidth;
  std::size_t seeds = 20;
  std::string kernel = "epanechnikov";
  unsigned threads = 1;
  auto* c_ms = app.add_subcommand("meanshift", "find modes of a set of scored pose votes");
  add_object(c_ms);
  c_ms->add_option("--in", in_path, "votes (JSON lines)")->required()->check(CLI::ExistingFile);
  c_ms->add_option("--out", out_path, "modes (JSON lines, score = density)")->required();
  c_ms->add_option("--bandwidth", bandwidth, "kernel bandwidth (default: delta)")->check(CLI::PositiveNumber);
  c_ms->add_option("--seeds", seeds, "number of top-scored votes used as seeds")->capture_default_str()->check(CLI::PositiveNumber);
  c_ms->add_option("--kernel", kernel, "epanechnikov or gaussian")->check(CLI::IsMember({"epanechnikov", "gaussian"}))->capture_default_str();
  c_ms->add_option("--threads", threads, "worker threads, 0 = all cores")->capture_default_str();
  add_delta_fraction(c_ms);
  add_frame(c_ms);

  // annotate
  double max_rms = 5.0;
  auto* c_ann = app.add_subcommand("annotate", "solve instance poses from marker correspondences");
  c_ann->add_option("--in", in_path, "correspondence file (JSON)")->required()->check(CLI::ExistingFile);
  c_ann->add_option("--out", out_path, "scene file")->required();
  c_ann->add_option("--max-rms", max_rms, "reject solutions above this RMS (pixels)")->capture_default_str()->check(CLI::PositiveNumber);

  // gen-scenes
  std::size_t count = 1, instances = 10;
  std::uint64_t seed = 0;
  std::string out_dir;
  auto* c_gen = app.add_subcommand("gen-scenes", "generate synthetic bin scenes with occlusion annotations");
  add_object(c_gen);
  c_gen->add_option("--count", count, "number of scenes")->capture_default_str()->check(CLI::PositiveNumber);
  c_gen->add_option("--instances", instances, "instances per scene")->capture_default_str()->check(CLI::PositiveNumber);
  c_gen->add_option("--seed", seed, "64-bit random seed")->capture_default_str();
  c_gen->add_option("--out", out_dir, "output directory")->required();

  // occlusion
  std::string scene_path;
  auto* c_occ = app.add_subcommand("occlusion", "recompute occlusion rates of a scene file");
  add_object(c_occ);
  c_occ->add_option("--scene", scene_path, "scene file with camera")->required()->check(CLI::ExistingFile);
  c_occ->add_option("--out", out_path, "updated scene file")->required();
  add_frame(c_occ);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  ObjectHandle obj;
  if (!object_path.empty()) {
    if (int rc = report(psym_object_load(object_path.c_str(), &obj.ptr))) return rc;
  }
  double delta = 0.0;
  if (obj.ptr) {
    if (int rc = report(psym_default_threshold(obj.ptr, delta_fraction, &delta))) return rc;
  }

  if (c_dist->parsed()) {
    psym_pose a, b;
    if (int rc = report(psym_read_pose_file(pose_a.c_str(), &a))) return rc;
    if (int rc = report(psym_read_pose_file(pose_b.c_str(), &b))) return rc;
    if (frame == PSYM_FRAME_ORIGINAL) {
      if (int rc = report(psym_pose_to_centered(obj.ptr, &a, &a))) return rc;
      if (int rc = report(psym_pose_to_centered(obj.ptr, &b, &b))) return rc;
    }
    double d = 0, fwd = 0, bwd = 0, sym = 0;
    if (int rc = report(psym_distance(obj.ptr, &a, &b, &d))) return rc;
    if (int rc = report(psym_adi(obj.ptr, &a, &b, PSYM_ADI_FORWARD, &fwd))) return rc;
    if (int rc = report(psym_adi(obj.ptr, &a, &b, PSYM_ADI_BACKWARD, &bwd))) return rc;
    if (int rc = report(psym_adi(obj.ptr, &a, &b, PSYM_ADI_SYMMETRIC, &sym))) return rc;
    std::cout << "distance: " << fmt(d) << "\n"
              << "adi_forward: " << fmt(fwd) << "\n"
              << "adi_backward: " << fmt(bwd) << "\n"
              << "adi_symmetric: " << fmt(sym) << "\n"
              << "delta: " << fmt(delta) << "\n"
              << (d < delta ? "MATCH" : "NO MATCH") << "\n";
    return 0;
  }

  if (c_eval->parsed()) {
    psym_eval_config cfg{delta_fraction, delta_o, per_scene_ap ? 1 : 0, frame};
    psym_eval_summary s{};
    if (int rc = report(psym_evaluate_dirs(obj.ptr, gt_dir.c_str(), pred_dir.c_str(), &cfg,
                                           report_path.c_str(), csv_path.c_str(), &s)))
      return rc;
    std::cout << "AP: " << fmt(s.ap) << "\nAP1: " << fmt(s.ap1) << "\nAP3: " << fmt(s.ap3)
              << "\nprecision: " << fmt(s.precision) << "\nrecall: " << fmt(s.recall) << "\n";
    return 0;
  }

  if (c_filter->parsed()) {
    std::size_t kept = 0;
    if (int rc = report(psym_filter_file(obj.ptr, in_path.c_str(), out_path.c_str(),
                                         radius.value_or(delta), keep, frame, &kept)))
      return rc;
    std::cout << "kept: " << kept << "\n";
    return 0;
  }

  if (c_ms->parsed()) {
    psym_meanshift_params p{bandwidth.value_or(delta), seeds, 0,
                            kernel == "gaussian" ? PSYM_KERNEL_GAUSSIAN : PSYM_KERNEL_EPANECHNIKOV,
                            threads};
    std::size_t modes = 0;
    if (int rc = report(psym_meanshift_file(obj.ptr, in_path.c_str(), out_path.c_str(), &p, frame, &modes)))
      return rc;
    std::cout << "modes: " << modes << "\n";
    return 0;
  }

  if (c_ann->parsed()) {
    std::size_t solved = 0, failed = 0;
    if (int rc = report(psym_annotate_file(in_path.c_str(), out_path.c_str(), max_rms, &solved, &failed)))
      return rc;
    std::cout << "solved: " << solved << "\nfailed: " << failed << "\n";
    return 0;
  }

  if (c_gen->parsed()) {
    if (int rc = report(psym_generate_scenes(obj.ptr, out_dir.c_str(), count, instances, seed))) return rc;
    std::cout << "scenes: " << count << "\n";
    return 0;
  }

  if (c_occ->parsed()) {
    return report(psym_occlusion_file(obj.ptr, scene_path.c_str(), out_path.c_str(), frame));
  }
  return 1;
}
