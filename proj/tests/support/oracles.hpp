// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors
//
// Independent reference implementations used as test oracles. None of these
// call the code paths they check.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "posesym/eval_metrics.hpp"
#include "posesym/object_model.hpp"
#include "posesym/pnp.hpp"
#include "posesym/pose.hpp"
#include "posesym/pose_space.hpp"

namespace posesym::testing {

/// The seven symmetry cases exercised throughout the suite.
enum class TestClass {
  trivial,
  brick,       // cyclic order 2
  cyclic6,
  icosahedral,
  revolution,
  revolution_flip,
  spherical,
};

std::vector<TestClass> all_test_classes();
std::string name(TestClass c);

/// A mesh and group for each case. Sizes are a few centimetres-ish units.
ObjectModel make_test_object(TestClass c);

/// Vertices recentred at their own mean.
std::vector<Eigen::Vector3d> centered_vertices(const ObjectModel& obj);

/// Object whose Λ is the discrete second-moment root of `samples`, so that
/// the closed-form distance equals the sampled RMS displacement.
ObjectModel with_discrete_lambda(const ObjectModel& obj,
                                 const std::vector<Eigen::Vector3d>& samples);

Pose random_pose(SplitMix64& rng, double translation_scale);

/// Uniformly drawn symmetry element of the object's group (any angle for the
/// continuous classes, with the flip branch where present).
Eigen::Matrix3d random_symmetry(SplitMix64& rng, const ObjectModel& obj);

/// Exhaustive minimum of RMS displacement over symmetry elements, written
/// from scratch: finite groups by enumeration, revolution by a fine grid
/// refined with golden-section search, spherical by the rotation-free term.
double rms_distance_reference(const Pose& a, const Pose& b, const ObjectModel& obj,
                              const std::vector<Eigen::Vector3d>& samples);

struct ScanHit {
  std::size_t id;
  double distance;
};

/// Linear scan with posesym::distance; ties to the lowest id.
ScanHit linear_nearest(const std::vector<Pose>& poses, const Pose& q, const ObjectModel& obj);
/// All ids with distance <= r, sorted by (distance, id).
std::vector<ScanHit> linear_radius(const std::vector<Pose>& poses, const Pose& q, double r,
                                   const ObjectModel& obj);

struct BruteMatch {
  std::vector<std::pair<std::size_t, std::size_t>> tp;  // sorted
  std::vector<std::size_t> fp;                          // sorted
  std::vector<std::size_t> fn;                          // sorted
  std::size_t uninteresting = 0;
};

/// Pairwise predicate evaluation over every (p, t): a pair is mutual when
/// neither any other instance is strictly nearer to p (or equally near with a
/// lower index) nor any other prediction is preferred by t.
BruteMatch brute_force_match(const std::vector<ScoredPose>& preds,
                             const std::vector<GroundTruthInstance>& gt,
                             const ObjectModel& obj, double delta, double delta_o);

/// Stratified surface sampling estimate of (1/S)∫xxᵀds with about `samples`
/// points, then its PSD root via a separate Jacobi eigen-solver.
Eigen::Matrix3d monte_carlo_lambda(const TriangleMesh& mesh, std::size_t samples,
                                   std::uint64_t seed);

/// Central finite differences of the stacked residual with respect to the
/// local increment (ω, δt).
Eigen::MatrixXd finite_difference_jacobian(const Pose& pose, const CorrespondenceSet& corr,
                                           const std::vector<CameraModel>& cams, double step);

struct PlantedVotes {
  std::vector<Pose> centers;
  std::vector<ScoredPose> votes;
};

/// `clusters` centres at least `min_separation` apart (pose distance), each
/// with `per_cluster` votes whose representative points carry isotropic
/// Gaussian noise of total RMS norm `noise_rms`. Scores uniform in [0.5, 1).
PlantedVotes planted_votes(const ObjectModel& obj, SplitMix64& rng, int clusters,
                           int per_cluster, double noise_rms, double min_separation,
                           double translation_scale);

/// Two-camera rig looking at the origin from ~`distance` with K (f=800, 640×480).
std::vector<CameraModel> stereo_rig(SplitMix64& rng, double distance);

/// Projects `markers` (object frame) through every camera; every marker is
/// visible in every view.
CorrespondenceSet synthesize_correspondences(const Pose& pose,
                                             const std::vector<Eigen::Vector3d>& markers,
                                             const std::vector<CameraModel>& cams,
                                             SplitMix64* noise_rng = nullptr,
                                             double sigma = 0.0);

}  // namespace posesym::testing
