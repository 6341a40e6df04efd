// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "posesym/pose.hpp"

namespace posesym {

/// Pinhole camera. `extrinsics` maps reference-frame points into the camera
/// frame (camera-from-reference).
struct CameraModel {
  Eigen::Matrix3d intrinsics = Eigen::Matrix3d::Identity();
  Pose extrinsics;

  /// Throws DataError unless K is upper triangular with positive focal terms.
  void validate() const;
  /// Pixel of a camera-frame point; the point must be in front (z > 0).
  Eigen::Vector2d project(const Eigen::Vector3d& camera_point) const;
};

struct Correspondence {
  Eigen::Vector3d object_point;  // X, object frame
  Eigen::Vector2d pixel;         // p
};

/// Per-camera correspondence lists; views[j] pairs with cameras[j].
struct CorrespondenceSet {
  std::vector<std::vector<Correspondence>> views;
  std::size_t total() const;
};

/// Optional hook applied to every observed pixel before solving, e.g. to
/// remove lens distortion. Receives the camera index and the raw pixel.
using UndistortFn = std::function<Eigen::Vector2d(std::size_t, const Eigen::Vector2d&)>;

struct ResidualReport {
  /// Pixel error norm per correspondence, views concatenated in order.
  std::vector<double> errors;
  /// True where the point lies behind (or on) the camera plane; its error is
  /// reported as +inf.
  std::vector<bool> behind_camera;
  double rms = 0.0;  // sqrt(mean error²) over points in front
};

/// ‖π_j(R X + t) − p‖ for every correspondence.
ResidualReport reprojection_residuals(const Pose& pose, const CorrespondenceSet& corr,
                                      std::span<const CameraModel> cams);

struct PnpOptions {
  int max_iterations = 100;
  double step_tolerance = 1e-10;
  /// Solutions whose RMS residual exceeds this are flagged as failed.
  double max_rms = 5.0;
  UndistortFn undistort;
};

struct PnpResult {
  Pose pose;
  double rms = 0.0;  // pixels, sqrt(mean ‖r‖²) per correspondence
  int iterations = 0;
  bool converged = false;
  /// Objective Σ‖r‖² after the initial estimate and every accepted step.
  std::vector<double> cost_trace;
};

/// Multiview PnP: minimizes Σ_j Σ_i ‖π_j(R X + t) − p‖² with Levenberg-Marquardt
/// on local increments (R ← exp(ω)R, t ← t + δt). Without `init`, starts from a
/// DLT estimate (non-coplanar points) or a homography estimate (coplanar
/// points) from the camera with the most correspondences. Throws DataError for
/// fewer than 3 correspondences or collinear object points.
PnpResult solve_multiview_pnp(const CorrespondenceSet& corr, std::span<const CameraModel> cams,
                              const std::optional<Pose>& init = std::nullopt,
                              const PnpOptions& options = {});

/// Stacked residual vector (2 per correspondence) and its 2N×6 Jacobian with
/// respect to (ω, δt) at the current pose.
void pnp_residuals_and_jacobian(const Pose& pose, const CorrespondenceSet& corr,
                                std::span<const CameraModel> cams, Eigen::VectorXd& residuals,
                                Eigen::MatrixXd* jacobian);

/// Pose after applying the local increment (ω, δt).
Pose apply_increment(const Pose& pose, const Eigen::Matrix<double, 6, 1>& delta);

/// First-order covariance σ² (JᵀJ)⁻¹ of (ω, δt) for isotropic pixel noise σ.
Eigen::Matrix<double, 6, 6> pose_covariance(const Pose& pose, const CorrespondenceSet& corr,
                                            std::span<const CameraModel> cams, double sigma);

}  // namespace posesym
