// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace posesym {

/// An active rigid transform x -> R x + t. Semantically a pose is the class
/// {T ∘ G | G in the symmetry group}; that equivalence lives in the distance,
/// the stored rotation is never canonicalized.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose identity() { return {}; }

  Eigen::Vector3d apply(const Eigen::Vector3d& x) const {
    return rotation * x + translation;
  }
  Pose inverse() const {
    return {rotation.transpose(), -(rotation.transpose() * translation)};
  }
  /// (this ∘ other)(x) = this(other(x))
  Pose compose(const Pose& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }
  /// this ∘ G for a symmetry rotation G of the object frame.
  Pose with_symmetry(const Eigen::Matrix3d& g) const { return {rotation * g, translation}; }
};

/// RᵀR = I and det R = +1 within `tol`.
bool is_valid_pose(const Pose& p, double tol = 1e-9);

/// Nearest proper rotation in Frobenius norm (SVD with determinant fix).
Eigen::Matrix3d project_to_rotation(const Eigen::Matrix3d& m);

/// Rodrigues exponential of an axis-angle vector.
Eigen::Matrix3d so3_exp(const Eigen::Vector3d& omega);
/// Inverse of so3_exp for angles in [0, π].
Eigen::Vector3d so3_log(const Eigen::Matrix3d& r);

/// A rotation taking e_z onto the unit vector `axis` (minimal-angle choice).
Eigen::Matrix3d rotation_aligning_z(const Eigen::Vector3d& axis);

/// Rotation of the unit quaternion (w, x, y, z).
Eigen::Matrix3d rotation_from_quaternion(double w, double x, double y, double z);

/// Maps three independent U(0,1) draws to a rotation uniformly distributed on
/// SO(3) (Shoemake's subgroup algorithm on unit quaternions).
Eigen::Matrix3d uniform_rotation(double u1, double u2, double u3);

/// Deterministic 64-bit generator (splitmix64) with a portable uniform double
/// in [0, 1). Identical sequences on every platform, unlike std distributions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();
  Eigen::Matrix3d rotation() { return uniform_rotation(uniform(), uniform(), uniform()); }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace posesym
