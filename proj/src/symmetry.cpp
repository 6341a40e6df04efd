// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#include "posesym/symmetry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Geometry>

#include "posesym/error.hpp"

namespace posesym {

namespace {

double max_abs_diff(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Index of the element of `list` within `tol` of `m`, or -1.
int find_element(std::span<const Eigen::Matrix3d> list, const Eigen::Matrix3d& m,
                 double tol) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (max_abs_diff(list[i], m) <= tol) return static_cast<int>(i);
  }
  return -1;
}

Eigen::Matrix3d axis_rotation(const Eigen::Vector3d& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

}  // namespace

std::string_view to_string(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::finite: return "finite";
    case SymmetryClass::revolution: return "revolution";
    case SymmetryClass::revolution_rotoreflection: return "revolution_rotoreflection";
    case SymmetryClass::spherical: return "spherical";
  }
  return "finite";
}

SymmetryClass symmetry_class_from_string(std::string_view s) {
  if (s == "finite") return SymmetryClass::finite;
  if (s == "revolution") return SymmetryClass::revolution;
  if (s == "revolution_rotoreflection") return SymmetryClass::revolution_rotoreflection;
  if (s == "spherical") return SymmetryClass::spherical;
  throw DataError("unknown symmetry class '" + std::string(s) + "'");
}

ProperSymmetryGroup ProperSymmetryGroup::trivial() { return {}; }

ProperSymmetryGroup ProperSymmetryGroup::finite(RotationList rotations) {
  ProperSymmetryGroup g;
  g.cls = SymmetryClass::finite;
  g.rotations = std::move(rotations);
  return g;
}

ProperSymmetryGroup ProperSymmetryGroup::revolution(bool rotoreflection) {
  ProperSymmetryGroup g;
  g.cls = rotoreflection ? SymmetryClass::revolution_rotoreflection
                         : SymmetryClass::revolution;
  g.rotations.clear();
  return g;
}

ProperSymmetryGroup ProperSymmetryGroup::spherical() {
  ProperSymmetryGroup g;
  g.cls = SymmetryClass::spherical;
  g.rotations.clear();
  return g;
}

std::size_t ProperSymmetryGroup::representative_count() const {
  switch (cls) {
    case SymmetryClass::finite: return rotations.size();
    case SymmetryClass::revolution: return 1;
    case SymmetryClass::revolution_rotoreflection: return 2;
    case SymmetryClass::spherical: return 1;
  }
  return 1;
}

GroupCheck validate_group(std::span<const Eigen::Matrix3d> rotations, double tol) {
  auto fail = [](std::string msg) { return GroupCheck{false, std::move(msg)}; };
  if (rotations.empty()) return fail("empty rotation list");

  for (std::size_t i = 0; i < rotations.size(); ++i) {
    const Eigen::Matrix3d& r = rotations[i];
    if (!r.allFinite()) return fail("element " + std::to_string(i) + " is not finite");
    if (max_abs_diff(r.transpose() * r, Eigen::Matrix3d::Identity()) > tol) {
      return fail("element " + std::to_string(i) + " is not orthogonal");
    }
    if (std::abs(r.determinant() - 1.0) > tol) {
      return fail("element " + std::to_string(i) + " is not a proper rotation (det != +1)");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (max_abs_diff(rotations[j], r) <= tol) {
        return fail("elements " + std::to_string(j) + " and " + std::to_string(i) +
                    " coincide");
      }
    }
  }
  if (find_element(rotations, Eigen::Matrix3d::Identity(), tol) < 0) {
    return fail("identity missing");
  }
  for (std::size_t i = 0; i < rotations.size(); ++i) {
    if (find_element(rotations, rotations[i].transpose(), tol) < 0) {
      return fail("inverse of element " + std::to_string(i) + " missing");
    }
    for (std::size_t j = 0; j < rotations.size(); ++j) {
      if (find_element(rotations, rotations[i] * rotations[j], tol) < 0) {
        std::ostringstream os;
        os << "not closed: product of elements " << i << " and " << j
           << " is not in the list";
        return fail(os.str());
      }
    }
  }
  return {};
}

Eigen::Matrix3d rotation_x(double angle) {
  return axis_rotation(Eigen::Vector3d::UnitX(), angle);
}
Eigen::Matrix3d rotation_y(double angle) {
  return axis_rotation(Eigen::Vector3d::UnitY(), angle);
}
Eigen::Matrix3d rotation_z(double angle) {
  return axis_rotation(Eigen::Vector3d::UnitZ(), angle);
}

RotationList cyclic_group(int order) {
  if (order < 1) throw DataError("cyclic order must be >= 1");
  RotationList out;
  out.reserve(order);
  for (int k = 0; k < order; ++k) {
    out.push_back(rotation_z(2.0 * std::numbers::pi * k / order));
  }
  out.front() = Eigen::Matrix3d::Identity();
  return out;
}

RotationList dihedral_group(int order) {
  if (order < 1) throw DataError("dihedral order must be >= 1");
  RotationList out = cyclic_group(order);
  const Eigen::Matrix3d flip = rotation_x(std::numbers::pi);
  for (int k = 0; k < order; ++k) out.push_back(flip * out[k]);
  return out;
}

RotationList generate_group(std::span<const Eigen::Matrix3d> generators,
                            std::size_t max_order) {
  constexpr double kTol = 1e-9;
  RotationList out{Eigen::Matrix3d::Identity()};
  for (std::size_t frontier = 0; frontier < out.size(); ++frontier) {
    for (const auto& g : generators) {
      Eigen::Matrix3d candidate = out[frontier] * g;
      // Re-orthonormalize so long products do not drift.
      Eigen::JacobiSVD<Eigen::Matrix3d> svd(candidate,
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
      candidate = svd.matrixU() * svd.matrixV().transpose();
      if (find_element(out, candidate, kTol) < 0) {
        if (out.size() >= max_order) {
          throw DataError("generators do not span a finite group of order <= " +
                          std::to_string(max_order));
        }
        out.push_back(candidate);
      }
    }
  }
  return out;
}

RotationList tetrahedral_group() {
  const Eigen::Matrix3d gens[] = {
      axis_rotation({1, 1, 1}, 2.0 * std::numbers::pi / 3.0),
      rotation_z(std::numbers::pi),
  };
  return generate_group(gens);
}

RotationList octahedral_group() {
  const Eigen::Matrix3d gens[] = {
      rotation_z(std::numbers::pi / 2.0),
      rotation_x(std::numbers::pi / 2.0),
  };
  return generate_group(gens);
}

RotationList icosahedral_group() {
  const double phi = std::numbers::phi;
  // Five-fold axis through the icosahedron vertex (0, 1, phi) and three-fold
  // axis through the face center (1, 1, 1).
  const Eigen::Matrix3d gens[] = {
      axis_rotation({0, 1, phi}, 2.0 * std::numbers::pi / 5.0),
      axis_rotation({1, 1, 1}, 2.0 * std::numbers::pi / 3.0),
  };
  return generate_group(gens);
}

}  // namespace posesym
