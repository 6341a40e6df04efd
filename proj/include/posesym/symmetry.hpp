// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace posesym {

using RotationList = std::vector<Eigen::Matrix3d>;

/// The four classes of proper symmetry groups a bounded rigid object can have.
/// Revolution axes are always the object-frame z axis.
enum class SymmetryClass {
  finite,
  revolution,
  revolution_rotoreflection,
  spherical,
};

std::string_view to_string(SymmetryClass c);
SymmetryClass symmetry_class_from_string(std::string_view s);

struct ProperSymmetryGroup {
  SymmetryClass cls = SymmetryClass::finite;
  /// Explicit elements, finite class only. Always contains the identity.
  RotationList rotations{Eigen::Matrix3d::Identity()};

  static ProperSymmetryGroup trivial();
  static ProperSymmetryGroup finite(RotationList rotations);
  static ProperSymmetryGroup revolution(bool rotoreflection);
  static ProperSymmetryGroup spherical();

  /// Number of pose representatives this group induces.
  std::size_t representative_count() const;
};

struct GroupCheck {
  bool ok = true;
  std::string diagnostic;
  explicit operator bool() const { return ok; }
};

/// Checks the group axioms (identity, closure, inverses) and that every
/// element is a proper rotation, all within `tol` in max-abs entry norm.
GroupCheck validate_group(std::span<const Eigen::Matrix3d> rotations,
                          double tol = 1e-9);

Eigen::Matrix3d rotation_x(double angle);
Eigen::Matrix3d rotation_y(double angle);
Eigen::Matrix3d rotation_z(double angle);

/// {Rz(2πk/n) | k < n}
RotationList cyclic_group(int order);
/// Cyclic group about z plus the half turns about axes in the xy plane.
RotationList dihedral_group(int order);
/// Closure of a generator set under composition. Throws if more than
/// `max_order` elements appear (the generators do not span a finite group).
RotationList generate_group(std::span<const Eigen::Matrix3d> generators,
                            std::size_t max_order = 120);
RotationList tetrahedral_group();
RotationList octahedral_group();
RotationList icosahedral_group();

}  // namespace posesym
