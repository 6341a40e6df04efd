// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#include "posesym/object_model.hpp"

#include <cmath>
#include <fstream>

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <json.hpp>

#include "posesym/error.hpp"

namespace posesym {

using nlohmann::json;

ObjectModel ObjectModel::create(TriangleMesh mesh, ProperSymmetryGroup group,
                                LambdaSource source) {
  check_mesh(mesh);
  if (group.cls == SymmetryClass::finite) {
    if (const auto check = validate_group(group.rotations, kGroupTolerance); !check) {
      throw DataError("non-group rotation list: " + check.diagnostic);
    }
  } else {
    group.rotations.clear();
  }

  ObjectModel obj;
  obj.origin_offset_ = surface_centroid(mesh);
  for (auto& v : mesh.vertices) v -= obj.origin_offset_;
  obj.mesh_ = std::move(mesh);
  obj.group_ = std::move(group);
  obj.area_ = posesym::surface_area(obj.mesh_);
  obj.diameter_ = diameter_about(obj.mesh_, Eigen::Vector3d::Zero());
  obj.set_lambda(source == LambdaSource::surface ? compute_lambda(obj.mesh_)
                                                 : discrete_lambda(obj.mesh_.vertices));
  return obj;
}

ObjectModel ObjectModel::with_lambda(const Eigen::Matrix3d& lambda) const {
  ObjectModel copy = *this;
  copy.set_lambda(lambda);
  return copy;
}

void ObjectModel::set_lambda(const Eigen::Matrix3d& lambda) {
  lambda_ = lambda;
  lambda_scalar_ = 0.0;
  group_lambdas_.clear();
  for (const auto& g : group_.rotations) group_lambdas_.push_back(g * lambda);
  if (group_.cls == SymmetryClass::revolution ||
      group_.cls == SymmetryClass::revolution_rotoreflection) {
    const double tol = 1e-6 * lambda.trace();
    const double off = std::max({std::abs(lambda(0, 1)), std::abs(lambda(0, 2)),
                                 std::abs(lambda(1, 2))});
    if (off > tol || std::abs(lambda(0, 0) - lambda(1, 1)) > tol) {
      throw DataError(
          "revolution object is not axially symmetric about z (Lambda is not "
          "diag(l_r, l_r, l_z))");
    }
    const double lr = 0.5 * (lambda(0, 0) + lambda(1, 1));
    lambda_scalar_ = std::sqrt(lr * lr + lambda(2, 2) * lambda(2, 2));
  }
}

namespace {

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) {
    Eigen::Matrix3d u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return r;
}

Eigen::Matrix3d parse_rotation(const json& j) {
  if (!j.is_array()) throw DataError("rotation must be an array");
  if (j.size() == 9) {
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = j.at(3 * r + c).get<double>();
    // Rotations given with limited precision are snapped; the group check
    // below still applies its own tolerance to closure.
    if ((m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6 ||
        m.determinant() < 0) {
      throw DataError("symmetry element is not a proper rotation");
    }
    return nearest_rotation(m);
  }
  if (j.size() == 4) {
    Eigen::Quaterniond q(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                         j[3].get<double>());
    if (q.norm() < 1e-12) throw DataError("zero quaternion in symmetry spec");
    return q.normalized().toRotationMatrix();
  }
  throw DataError("rotation must have 9 (matrix) or 4 (quaternion) entries");
}

ProperSymmetryGroup symmetry_from_json(const json& s) {
  if (!s.is_object()) throw DataError("\"symmetry\" must be an object");
  const auto cls = symmetry_class_from_string(s.value("class", std::string("finite")));
  if (cls == SymmetryClass::revolution) return ProperSymmetryGroup::revolution(false);
  if (cls == SymmetryClass::revolution_rotoreflection) {
    return ProperSymmetryGroup::revolution(true);
  }
  if (cls == SymmetryClass::spherical) return ProperSymmetryGroup::spherical();

  const int forms = int(s.contains("rotations")) + int(s.contains("cyclic_order")) +
                    int(s.contains("dihedral_order")) + int(s.contains("polyhedral"));
  if (forms > 1) throw DataError("symmetry spec gives more than one finite group form");
  RotationList rotations{Eigen::Matrix3d::Identity()};
  if (s.contains("rotations")) {
    rotations.clear();
    for (const auto& r : s.at("rotations")) rotations.push_back(parse_rotation(r));
    if (const auto check = validate_group(rotations, kGroupTolerance); !check) {
      throw DataError("non-group rotation list: " + check.diagnostic);
    }
  } else if (s.contains("cyclic_order")) {
    const std::string axis = s.value("axis", std::string("z"));
    if (axis != "z") throw DataError("cyclic symmetry axis must be z");
    rotations = cyclic_group(s.at("cyclic_order").get<int>());
  } else if (s.contains("dihedral_order")) {
    rotations = dihedral_group(s.at("dihedral_order").get<int>());
  } else if (s.contains("polyhedral")) {
    const auto name = s.at("polyhedral").get<std::string>();
    if (name == "tetrahedral") rotations = tetrahedral_group();
    else if (name == "octahedral") rotations = octahedral_group();
    else if (name == "icosahedral") rotations = icosahedral_group();
    else throw DataError("unknown polyhedral group '" + name + "'");
  }
  return ProperSymmetryGroup::finite(std::move(rotations));
}

}  // namespace

ProperSymmetryGroup parse_symmetry(const std::string& json_text) {
  try {
    return symmetry_from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid symmetry spec: ") + e.what());
  }
}

ObjectModel load_object(const std::filesystem::path& descriptor) {
  std::ifstream in(descriptor);
  if (!in) throw DataError("cannot open object descriptor " + descriptor.string());
  try {
    const json j = json::parse(in);
    std::filesystem::path mesh_path = j.at("mesh").get<std::string>();
    if (mesh_path.is_relative()) mesh_path = descriptor.parent_path() / mesh_path;
    const ProperSymmetryGroup group =
        symmetry_from_json(j.value("symmetry", json{{"class", "finite"}}));
    const std::string source = j.value("lambda_source", std::string("surface"));
    if (source != "surface" && source != "vertices") {
      throw DataError("lambda_source must be \"surface\" or \"vertices\"");
    }
    return ObjectModel::create(load_mesh(mesh_path), group,
                               source == "surface" ? LambdaSource::surface
                                                   : LambdaSource::vertices);
  } catch (const json::exception& e) {
    throw DataError(descriptor.string() + ": " + e.what());
  }
}

}  // namespace posesym
