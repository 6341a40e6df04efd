// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "posesym/defaults.hpp"
#include "posesym/mesh.hpp"
#include "posesym/symmetry.hpp"

namespace posesym {

enum class LambdaSource {
  surface,   // exact surface integral (default)
  vertices,  // discrete second moment of the mesh vertices
};

/// A rigid object: mesh re-centered on its surface centroid, its proper
/// symmetry group, and the derived Λ, λ and diameter. Immutable once built.
class ObjectModel {
 public:
  /// Re-centers `mesh`, computes the derived quantities and validates them.
  /// Throws DataError for degenerate meshes, non-group rotation lists, or a
  /// revolution object whose Λ is not axially symmetric about z.
  static ObjectModel create(TriangleMesh mesh, ProperSymmetryGroup group,
                            LambdaSource source = LambdaSource::surface);

  const TriangleMesh& mesh() const { return mesh_; }
  const ProperSymmetryGroup& group() const { return group_; }
  SymmetryClass symmetry_class() const { return group_.cls; }
  /// Λ, symmetric PSD, length units.
  const Eigen::Matrix3d& lambda() const { return lambda_; }
  /// G·Λ for every element G of a finite group (empty otherwise).
  const std::vector<Eigen::Matrix3d>& symmetric_lambdas() const { return group_lambdas_; }
  /// λ = sqrt(λ_r² + λ_z²); meaningful for revolution classes.
  double lambda_scalar() const { return lambda_scalar_; }
  /// Surface centroid expressed in the mesh's original frame.
  const Eigen::Vector3d& origin_offset() const { return origin_offset_; }
  double diameter() const { return diameter_; }
  double surface_area() const { return area_; }
  /// δ = fraction × diameter.
  double match_threshold(double fraction = kDefaultDeltaFraction) const {
    return fraction * diameter_;
  }

  /// Same object with Λ (and λ) replaced, e.g. by a discrete second moment.
  ObjectModel with_lambda(const Eigen::Matrix3d& lambda) const;

 private:
  ObjectModel() = default;
  void set_lambda(const Eigen::Matrix3d& lambda);

  TriangleMesh mesh_;
  ProperSymmetryGroup group_;
  Eigen::Matrix3d lambda_ = Eigen::Matrix3d::Zero();
  std::vector<Eigen::Matrix3d> group_lambdas_;
  double lambda_scalar_ = 0.0;
  Eigen::Vector3d origin_offset_ = Eigen::Vector3d::Zero();
  double diameter_ = 0.0;
  double area_ = 0.0;
};

/// Loads an object descriptor (JSON):
///   { "mesh": "part.ply", "units": "m",
///     "symmetry": { "class": "finite", "rotations": [...], "cyclic_order": n,
///                   "dihedral_order": n, "polyhedral": "icosahedral" },
///     "lambda_source": "surface" }
/// The mesh path is resolved relative to the descriptor's directory.
/// Rotations are 9 row-major matrix entries or 4 quaternion entries (w,x,y,z).
ObjectModel load_object(const std::filesystem::path& descriptor);

/// Parses the "symmetry" member of a descriptor from its JSON text.
ProperSymmetryGroup parse_symmetry(const std::string& json_text);

}  // namespace posesym
