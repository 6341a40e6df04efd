// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#include "posesym/posesym.h"

#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "posesym/error.hpp"
#include "posesym/io.hpp"
#include "posesym/object_model.hpp"
#include "posesym/pose_index.hpp"
#include "posesym/pose_metric.hpp"
#include "posesym/pose_space.hpp"
#include "posesym/workflows.hpp"

struct psym_object {
  posesym::ObjectModel model;
};

struct psym_index {
  // The index keeps a pointer to its object; hold our own copy so the caller
  // may free the object handle first.
  std::unique_ptr<posesym::ObjectModel> model;
  std::unique_ptr<posesym::PoseIndex> index;
};

namespace {

thread_local std::string g_last_error;

psym_status fail(psym_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <class F>
psym_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return PSYM_OK;
  } catch (const posesym::Error& e) {
    return fail(static_cast<psym_status>(static_cast<int>(e.kind())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PSYM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PSYM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PSYM_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* name) {
  if (!p) throw posesym::UsageError(std::string(name) + " is null");
}

posesym::Pose to_pose(const psym_pose& p) {
  posesym::Pose out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out.rotation(r, c) = p.R[3 * r + c];
    out.translation[r] = p.t[r];
  }
  if (!posesym::is_valid_pose(out)) throw posesym::UsageError("pose rotation is not a proper rotation");
  return out;
}

psym_pose from_pose(const posesym::Pose& p) {
  psym_pose out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out.R[3 * r + c] = p.rotation(r, c);
    out.t[r] = p.translation[r];
  }
  return out;
}

std::vector<posesym::ScoredPose> scored(const psym_pose* poses, const double* scores,
                                        size_t count) {
  std::vector<posesym::ScoredPose> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    out.push_back({to_pose(poses[i]), scores ? scores[i] : 1.0, std::to_string(i)});
  }
  return out;
}

posesym::io::PoseFrame to_frame(psym_pose_frame f) {
  return f == PSYM_FRAME_ORIGINAL ? posesym::io::PoseFrame::original
                                  : posesym::io::PoseFrame::centered;
}

posesym::MeanShiftParams to_params(const posesym::ObjectModel& obj,
                                   const psym_meanshift_params* p) {
  posesym::MeanShiftParams out;
  out.bandwidth = obj.match_threshold();
  if (p) {
    if (p->bandwidth > 0) out.bandwidth = p->bandwidth;
    if (p->seed_count > 0) out.seed_count = p->seed_count;
    if (p->max_iterations > 0) out.max_iterations = p->max_iterations;
    if (p->kernel != PSYM_KERNEL_GAUSSIAN && p->kernel != PSYM_KERNEL_EPANECHNIKOV) {
      throw posesym::UsageError("unknown kernel");
    }
    out.kernel = p->kernel == PSYM_KERNEL_GAUSSIAN ? posesym::Kernel::gaussian
                                                   : posesym::Kernel::epanechnikov;
    out.threads = p->threads;
  }
  return out;
}

}  // namespace

extern "C" {

const char* psym_version(void) { return "0.1.0"; }

const char* psym_last_error(void) { return g_last_error.c_str(); }

psym_status psym_object_load(const char* descriptor_path, psym_object** out) {
  return guard([&] {
    require(descriptor_path, "descriptor_path");
    require(out, "out");
    *out = nullptr;
    *out = new psym_object{posesym::load_object(descriptor_path)};
  });
}

void psym_object_free(psym_object* obj) { delete obj; }

psym_status psym_object_info_get(const psym_object* obj, psym_object_info* out) {
  return guard([&] {
    require(obj, "obj");
    require(out, "out");
    const auto& m = obj->model;
    psym_object_info info{};
    info.symmetry = static_cast<psym_symmetry_class>(static_cast<int>(m.symmetry_class()));
    info.group_size = m.symmetry_class() == posesym::SymmetryClass::finite
                          ? m.group().rotations.size()
                          : 0;
    info.diameter = m.diameter();
    info.surface_area = m.surface_area();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) info.lambda[3 * r + c] = m.lambda()(r, c);
      info.origin_offset[r] = m.origin_offset()[r];
    }
    info.representative_dim = posesym::representative_dim(m.symmetry_class());
    *out = info;
  });
}

psym_status psym_default_threshold(const psym_object* obj, double fraction, double* out) {
  return guard([&] {
    require(obj, "obj");
    require(out, "out");
    if (!(fraction > 0.0 && fraction <= 1.0)) throw posesym::UsageError("fraction must be in (0, 1]");
    *out = obj->model.match_threshold(fraction);
  });
}

psym_status psym_pose_to_centered(const psym_object* obj, const psym_pose* in, psym_pose* out) {
  return guard([&] {
    require(obj, "obj");
    require(in, "in");
    require(out, "out");
    *out = from_pose(posesym::io::to_centered_frame(to_pose(*in), obj->model,
                                                    posesym::io::PoseFrame::original));
  });
}

psym_status psym_read_pose_file(const char* path, psym_pose* out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = from_pose(posesym::io::read_pose_file(path));
  });
}

psym_status psym_distance(const psym_object* obj, const psym_pose* a, const psym_pose* b,
                          double* out) {
  return guard([&] {
    require(obj, "obj");
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = posesym::distance(to_pose(*a), to_pose(*b), obj->model);
  });
}

psym_status psym_adi(const psym_object* obj, const psym_pose* a, const psym_pose* b,
                     psym_adi_direction direction, double* out) {
  return guard([&] {
    require(obj, "obj");
    require(a, "a");
    require(b, "b");
    require(out, "out");
    posesym::AdiDirection d = posesym::AdiDirection::forward;
    if (direction == PSYM_ADI_BACKWARD) d = posesym::AdiDirection::backward;
    else if (direction == PSYM_ADI_SYMMETRIC) d = posesym::AdiDirection::symmetric;
    else if (direction != PSYM_ADI_FORWARD) throw posesym::UsageError("unknown ADI direction");
    *out = posesym::adi_dissimilarity(to_pose(*a), to_pose(*b), obj->model.mesh().vertices, d);
  });
}

psym_status psym_index_build(const psym_object* obj, const psym_pose* poses, size_t count,
                             psym_index** out) {
  return guard([&] {
    require(obj, "obj");
    require(poses, "poses");
    require(out, "out");
    *out = nullptr;
    std::vector<posesym::Pose> list;
    list.reserve(count);
    for (size_t i = 0; i < count; ++i) list.push_back(to_pose(poses[i]));
    auto h = std::make_unique<psym_index>();
    h->model = std::make_unique<posesym::ObjectModel>(obj->model);
    h->index = std::make_unique<posesym::PoseIndex>(list, *h->model);
    *out = h.release();
  });
}

void psym_index_free(psym_index* index) { delete index; }

psym_status psym_index_nearest(const psym_index* index, const psym_pose* query, psym_hit* out) {
  return guard([&] {
    require(index, "index");
    require(query, "query");
    require(out, "out");
    const auto hit = index->index->nearest(to_pose(*query));
    *out = {hit.pose_id, hit.distance};
  });
}

psym_status psym_index_radius(const psym_index* index, const psym_pose* query, double radius,
                              psym_hit* hits, size_t capacity, size_t* found) {
  return guard([&] {
    require(index, "index");
    require(query, "query");
    require(found, "found");
    if (capacity > 0) require(hits, "hits");
    const auto res = index->index->radius_search(to_pose(*query), radius);
    for (size_t i = 0; i < res.size() && i < capacity; ++i) hits[i] = {res[i].pose_id, res[i].distance};
    *found = res.size();
  });
}

psym_status psym_filter_duplicates(const psym_object* obj, const psym_pose* poses,
                                   const double* scores, size_t count, double radius, size_t keep,
                                   size_t* kept, size_t* kept_count) {
  return guard([&] {
    require(obj, "obj");
    require(kept_count, "kept_count");
    if (count > 0) {
      require(poses, "poses");
      require(scores, "scores");
    }
    const auto list = scored(poses, scores, count);
    const auto idx = posesym::filter_duplicate_indices(list, obj->model, radius, keep);
    if (!idx.empty()) require(kept, "kept");
    for (size_t i = 0; i < idx.size(); ++i) kept[i] = idx[i];
    *kept_count = idx.size();
  });
}

psym_status psym_average(const psym_object* obj, const psym_pose* poses, const double* scores,
                         size_t count, psym_pose* out) {
  return guard([&] {
    require(obj, "obj");
    require(poses, "poses");
    require(out, "out");
    const auto list = scored(poses, scores, count);
    *out = from_pose(posesym::average(list, obj->model));
  });
}

psym_status psym_mean_shift(const psym_object* obj, const psym_pose* votes, const double* scores,
                            size_t count, const psym_meanshift_params* params, psym_pose* modes,
                            double* densities, size_t capacity, size_t* found) {
  return guard([&] {
    require(obj, "obj");
    require(found, "found");
    if (count > 0) require(votes, "votes");
    const auto list = scored(votes, scores, count);
    const auto res = posesym::mean_shift(list, obj->model, to_params(obj->model, params));
    for (size_t i = 0; i < res.size() && i < capacity; ++i) {
      if (modes) modes[i] = from_pose(res[i].pose);
      if (densities) densities[i] = res[i].density;
    }
    *found = res.size();
  });
}

psym_status psym_evaluate_dirs(const psym_object* obj, const char* gt_dir, const char* pred_dir,
                               const psym_eval_config* config, const char* report_path,
                               const char* csv_path, psym_eval_summary* summary) {
  return guard([&] {
    require(obj, "obj");
    require(gt_dir, "gt_dir");
    require(pred_dir, "pred_dir");
    posesym::workflows::EvaluateConfig cfg;
    if (config) {
      if (config->delta_fraction > 0) cfg.delta_fraction = config->delta_fraction;
      if (config->delta_o > 0) cfg.delta_o = config->delta_o;
      cfg.per_scene_ap = config->per_scene_ap != 0;
      cfg.frame = to_frame(config->frame);
    }
    const auto res = posesym::workflows::evaluate(obj->model, gt_dir, pred_dir, cfg);
    posesym::workflows::write_evaluation(res, report_path ? report_path : "",
                                         csv_path ? csv_path : "");
    if (summary) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      psym_eval_summary s{res.ap, nan, nan, res.precision.value_or(nan), res.recall.value_or(nan)};
      for (const auto& [n, v] : res.ap_at) {
        if (n == 1) s.ap1 = v;
        if (n == 3) s.ap3 = v;
      }
      *summary = s;
    }
  });
}

psym_status psym_filter_file(const psym_object* obj, const char* in_path, const char* out_path,
                             double radius, size_t keep, psym_pose_frame frame, size_t* kept) {
  return guard([&] {
    require(obj, "obj");
    require(in_path, "in_path");
    require(out_path, "out_path");
    const size_t n = posesym::workflows::filter_file(obj->model, in_path, out_path, radius, keep,
                                                     to_frame(frame));
    if (kept) *kept = n;
  });
}

psym_status psym_meanshift_file(const psym_object* obj, const char* in_path, const char* out_path,
                                const psym_meanshift_params* params, psym_pose_frame frame,
                                size_t* modes) {
  return guard([&] {
    require(obj, "obj");
    require(in_path, "in_path");
    require(out_path, "out_path");
    const size_t n = posesym::workflows::meanshift_file(
        obj->model, in_path, out_path, to_params(obj->model, params), to_frame(frame));
    if (modes) *modes = n;
  });
}

psym_status psym_annotate_file(const char* correspondences_path, const char* out_scene_path,
                               double max_rms, size_t* solved, size_t* failed) {
  return guard([&] {
    require(correspondences_path, "correspondences_path");
    require(out_scene_path, "out_scene_path");
    posesym::PnpOptions opt;
    if (max_rms > 0) opt.max_rms = max_rms;
    const auto s = posesym::workflows::annotate_file(correspondences_path, out_scene_path, opt);
    if (solved) *solved = s.solved;
    if (failed) *failed = s.failed;
  });
}

psym_status psym_generate_scenes(const psym_object* obj, const char* out_dir, size_t scene_count,
                                 size_t instances, uint64_t seed) {
  return guard([&] {
    require(obj, "obj");
    require(out_dir, "out_dir");
    posesym::workflows::GenerateConfig cfg;
    cfg.scene_count = scene_count;
    cfg.instances = instances;
    cfg.seed = seed;
    posesym::workflows::generate_scenes(obj->model, out_dir, cfg);
  });
}

psym_status psym_occlusion_file(const psym_object* obj, const char* scene_in,
                                const char* scene_out, psym_pose_frame frame) {
  return guard([&] {
    require(obj, "obj");
    require(scene_in, "scene_in");
    require(scene_out, "scene_out");
    posesym::workflows::occlusion_file(obj->model, scene_in, scene_out, to_frame(frame));
  });
}

}  // extern "C"
