/* SPDX-License-Identifier: Apache-2.0
 * Copyright (c) 2026 The posesym Authors
 *
 * C interface to posesym. All functions return a psym_status; on failure
 * psym_last_error() holds a message for the calling thread. Handles are
 * opaque and must be released with the matching *_free function.
 */
#ifndef POSESYM_H
#define POSESYM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PSYM_BUILDING_LIBRARY)
#    define PSYM_API __declspec(dllexport)
#  else
#    define PSYM_API __declspec(dllimport)
#  endif
#else
#  define PSYM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum psym_status {
  PSYM_OK = 0,
  PSYM_ERR_USAGE = 1,
  PSYM_ERR_DATA = 2,
  PSYM_ERR_NUMERICAL = 3,
  PSYM_ERR_INTERNAL = 4
} psym_status;

typedef enum psym_symmetry_class {
  PSYM_SYM_FINITE = 0,
  PSYM_SYM_REVOLUTION = 1,
  PSYM_SYM_REVOLUTION_REFLECTION = 2,
  PSYM_SYM_SPHERICAL = 3
} psym_symmetry_class;

typedef enum psym_adi_direction {
  PSYM_ADI_FORWARD = 0,
  PSYM_ADI_BACKWARD = 1,
  PSYM_ADI_SYMMETRIC = 2
} psym_adi_direction;

typedef enum psym_kernel { PSYM_KERNEL_EPANECHNIKOV = 0, PSYM_KERNEL_GAUSSIAN = 1 } psym_kernel;

typedef enum psym_pose_frame { PSYM_FRAME_CENTERED = 0, PSYM_FRAME_ORIGINAL = 1 } psym_pose_frame;

/* Row-major rotation and translation. */
typedef struct psym_pose {
  double R[9];
  double t[3];
} psym_pose;

typedef struct psym_object_info {
  psym_symmetry_class symmetry;
  size_t group_size;        /* number of proper rotations; 0 for continuous groups */
  double diameter;
  double surface_area;
  double lambda[9];         /* row-major */
  double origin_offset[3];  /* mesh origin expressed in the centered frame is -origin_offset */
  int representative_dim;
} psym_object_info;

typedef struct psym_hit {
  size_t pose_id;
  double distance;
} psym_hit;

typedef struct psym_meanshift_params {
  double bandwidth;        /* <= 0: 0.1 x diameter */
  size_t seed_count;       /* 0: 20 */
  int max_iterations;      /* <= 0: 100 */
  psym_kernel kernel;
  unsigned threads;        /* 0: hardware concurrency */
} psym_meanshift_params;

typedef struct psym_eval_config {
  double delta_fraction;   /* <= 0: 0.1 */
  double delta_o;          /* <= 0: 0.5 */
  int per_scene_ap;
  psym_pose_frame frame;
} psym_eval_config;

typedef struct psym_eval_summary {
  double ap;
  double ap1;
  double ap3;
  double precision;        /* NaN when undefined */
  double recall;           /* NaN when undefined */
} psym_eval_summary;

typedef struct psym_object psym_object;
typedef struct psym_index psym_index;

PSYM_API const char* psym_version(void);
PSYM_API const char* psym_last_error(void);

PSYM_API psym_status psym_object_load(const char* descriptor_path, psym_object** out);
PSYM_API void psym_object_free(psym_object* obj);
PSYM_API psym_status psym_object_info_get(const psym_object* obj, psym_object_info* out);
PSYM_API psym_status psym_default_threshold(const psym_object* obj, double fraction, double* out);

/* Convert a pose given relative to the mesh file origin into the centered frame. */
PSYM_API psym_status psym_pose_to_centered(const psym_object* obj, const psym_pose* in,
                                           psym_pose* out);
PSYM_API psym_status psym_read_pose_file(const char* path, psym_pose* out);

PSYM_API psym_status psym_distance(const psym_object* obj, const psym_pose* a,
                                   const psym_pose* b, double* out);
PSYM_API psym_status psym_adi(const psym_object* obj, const psym_pose* a, const psym_pose* b,
                              psym_adi_direction direction, double* out);

PSYM_API psym_status psym_index_build(const psym_object* obj, const psym_pose* poses,
                                      size_t count, psym_index** out);
PSYM_API void psym_index_free(psym_index* index);
PSYM_API psym_status psym_index_nearest(const psym_index* index, const psym_pose* query,
                                        psym_hit* out);
/* Fills up to `capacity` hits sorted by (distance, id); *found receives the
 * total number within the radius, which may exceed capacity. */
PSYM_API psym_status psym_index_radius(const psym_index* index, const psym_pose* query,
                                       double radius, psym_hit* hits, size_t capacity,
                                       size_t* found);

/* Writes indices of retained hypotheses into kept (capacity >= min(count, keep)). */
PSYM_API psym_status psym_filter_duplicates(const psym_object* obj, const psym_pose* poses,
                                            const double* scores, size_t count, double radius,
                                            size_t keep, size_t* kept, size_t* kept_count);
PSYM_API psym_status psym_average(const psym_object* obj, const psym_pose* poses,
                                  const double* scores, size_t count, psym_pose* out);
/* Modes are written strongest first; *found may exceed capacity. */
PSYM_API psym_status psym_mean_shift(const psym_object* obj, const psym_pose* votes,
                                     const double* scores, size_t count,
                                     const psym_meanshift_params* params, psym_pose* modes,
                                     double* densities, size_t capacity, size_t* found);

/* File-level commands. NULL paths for optional outputs skip writing them. */
PSYM_API psym_status psym_evaluate_dirs(const psym_object* obj, const char* gt_dir,
                                        const char* pred_dir, const psym_eval_config* config,
                                        const char* report_path, const char* csv_path,
                                        psym_eval_summary* summary);
PSYM_API psym_status psym_filter_file(const psym_object* obj, const char* in_path,
                                      const char* out_path, double radius, size_t keep,
                                      psym_pose_frame frame, size_t* kept);
PSYM_API psym_status psym_meanshift_file(const psym_object* obj, const char* in_path,
                                         const char* out_path,
                                         const psym_meanshift_params* params,
                                         psym_pose_frame frame, size_t* modes);
PSYM_API psym_status psym_annotate_file(const char* correspondences_path,
                                        const char* out_scene_path, double max_rms,
                                        size_t* solved, size_t* failed);
PSYM_API psym_status psym_generate_scenes(const psym_object* obj, const char* out_dir,
                                          size_t scene_count, size_t instances, uint64_t seed);
PSYM_API psym_status psym_occlusion_file(const psym_object* obj, const char* scene_in,
                                         const char* scene_out, psym_pose_frame frame);

#ifdef __cplusplus
}
#endif

#endif /* POSESYM_H */
