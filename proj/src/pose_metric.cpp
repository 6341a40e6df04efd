// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#include "posesym/pose_metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "posesym/error.hpp"
#include "posesym/kdtree.hpp"

namespace posesym {

namespace {

void write_finite(const Eigen::Matrix3d& rotation, const Eigen::Matrix3d& g_lambda,
                  const Eigen::Vector3d& t, double* out) {
  const Eigen::Matrix3d m = rotation * g_lambda;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out[3 * r + c] = m(r, c);
  out[9] = t.x();
  out[10] = t.y();
  out[11] = t.z();
}

void write_axis(const Eigen::Vector3d& axis, const Eigen::Vector3d& t, double* out) {
  out[0] = axis.x();
  out[1] = axis.y();
  out[2] = axis.z();
  out[3] = t.x();
  out[4] = t.y();
  out[5] = t.z();
}

}  // namespace

int representative_dim(SymmetryClass cls) {
  switch (cls) {
    case SymmetryClass::finite: return 12;
    case SymmetryClass::revolution:
    case SymmetryClass::revolution_rotoreflection: return 6;
    case SymmetryClass::spherical: return 3;
  }
  return 12;
}

void append_representatives(const Pose& pose, const ObjectModel& object,
                            std::vector<double>& out) {
  const int dim = representative_dim(object.symmetry_class());
  const std::size_t count = object.group().representative_count();
  const std::size_t base = out.size();
  out.resize(base + count * dim);
  double* dst = out.data() + base;
  const Eigen::Vector3d& t = pose.translation;
  switch (object.symmetry_class()) {
    case SymmetryClass::finite:
      for (const auto& gl : object.symmetric_lambdas()) {
        write_finite(pose.rotation, gl, t, dst);
        dst += dim;
      }
      break;
    case SymmetryClass::revolution_rotoreflection: {
      const Eigen::Vector3d axis = object.lambda_scalar() * pose.rotation.col(2);
      write_axis(axis, t, dst);
      write_axis(-axis, t, dst + dim);
      break;
    }
    case SymmetryClass::revolution:
      write_axis(object.lambda_scalar() * pose.rotation.col(2), t, dst);
      break;
    case SymmetryClass::spherical:
      dst[0] = t.x();
      dst[1] = t.y();
      dst[2] = t.z();
      break;
  }
}

void first_representative(const Pose& pose, const ObjectModel& object, double* out) {
  switch (object.symmetry_class()) {
    case SymmetryClass::finite:
      write_finite(pose.rotation, object.symmetric_lambdas().front(), pose.translation, out);
      break;
    case SymmetryClass::revolution:
    case SymmetryClass::revolution_rotoreflection:
      write_axis(object.lambda_scalar() * pose.rotation.col(2), pose.translation, out);
      break;
    case SymmetryClass::spherical:
      out[0] = pose.translation.x();
      out[1] = pose.translation.y();
      out[2] = pose.translation.z();
      break;
  }
}

RepresentativeSet representatives(const Pose& pose, const ObjectModel& object,
                                  std::int64_t pose_id) {
  RepresentativeSet set;
  set.dim = representative_dim(object.symmetry_class());
  set.pose_id = pose_id;
  append_representatives(pose, object, set.coords);
  return set;
}

Pose pose_from_representative(std::span<const double> point, const ObjectModel& object) {
  Pose pose;
  switch (object.symmetry_class()) {
    case SymmetryClass::finite: {
      Eigen::Matrix3d a;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a(r, c) = point[3 * r + c];
      // argmin_R ‖RΛ − A‖ maximizes trace(Rᵀ A Λ): Procrustes on AΛ.
      const Eigen::Matrix3d target = a * object.lambda();
      Eigen::JacobiSVD<Eigen::Matrix3d> svd(target, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Eigen::Vector3d s = svd.singularValues();
      if (!(s(1) > 1e-9 * s(0))) throw NumericalError("ambiguous mean");
      const Eigen::Matrix3d& u = svd.matrixU();
      const Eigen::Matrix3d& v = svd.matrixV();
      const double det = (u * v.transpose()).determinant();
      pose.rotation = u * Eigen::Vector3d(1.0, 1.0, det < 0 ? -1.0 : 1.0).asDiagonal() *
                      v.transpose();
      pose.translation = {point[9], point[10], point[11]};
      break;
    }
    case SymmetryClass::revolution:
    case SymmetryClass::revolution_rotoreflection: {
      const Eigen::Vector3d axis(point[0], point[1], point[2]);
      if (!(axis.norm() >= 1e-9 * object.lambda_scalar())) {
        throw NumericalError("ambiguous mean");
      }
      pose.rotation = rotation_aligning_z(axis);
      pose.translation = {point[3], point[4], point[5]};
      break;
    }
    case SymmetryClass::spherical:
      pose.translation = {point[0], point[1], point[2]};
      break;
  }
  return pose;
}

double distance_from_anchor(const Pose& p1, std::size_t anchor, const Pose& p2,
                            const ObjectModel& object) {
  const int dim = representative_dim(object.symmetry_class());
  thread_local std::vector<double> reps1, reps2;
  reps1.clear();
  reps2.clear();
  append_representatives(p1, object, reps1);
  append_representatives(p2, object, reps2);
  const std::size_t n1 = reps1.size() / dim;
  if (anchor >= n1) throw UsageError("representative anchor out of range");
  const double* p0 = reps1.data() + anchor * dim;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < reps2.size(); i += dim) {
    best = std::min(best, squared_point_distance(reps2.data() + i, p0, dim));
  }
  return std::sqrt(best);
}

double distance(const Pose& p1, const Pose& p2, const ObjectModel& object) {
  const int dim = representative_dim(object.symmetry_class());
  double p0[12];
  first_representative(p1, object, p0);
  thread_local std::vector<double> reps2;
  reps2.clear();
  append_representatives(p2, object, reps2);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < reps2.size(); i += dim) {
    best = std::min(best, squared_point_distance(reps2.data() + i, p0, dim));
  }
  return std::sqrt(best);
}

// ---------------------------------------------------------------------------
// Brute-force oracle. Works from the samples only; Λ is never consulted.

namespace {

double mean_squared_displacement(const Pose& p1, const Eigen::Matrix3d& r2g,
                                 const Eigen::Vector3d& t2,
                                 std::span<const Eigen::Vector3d> samples) {
  double acc = 0.0;
  for (const auto& x : samples) {
    acc += ((r2g * x + t2) - p1.apply(x)).squaredNorm();
  }
  return acc / static_cast<double>(samples.size());
}

// Minimizes f(α) = mean ‖R₂ B Rz(α) x + t₂ − T₁x‖² over α, where B is the
// identity or the axis flip of the rotoreflection branch.
double revolution_branch(const Pose& p1, const Pose& p2, const Eigen::Matrix3d& branch,
                         std::span<const Eigen::Vector3d> samples, int steps) {
  const Eigen::Matrix3d base = p2.rotation * branch;
  auto f = [&](double alpha) {
    return mean_squared_displacement(p1, base * rotation_z(alpha), p2.translation, samples);
  };
  double best_alpha = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < steps; ++k) {
    const double alpha = 2.0 * std::numbers::pi * k / steps;
    const double v = f(alpha);
    if (v < best) {
      best = v;
      best_alpha = alpha;
    }
  }
  // One Newton step on f using derivatives evaluated over the samples:
  // y' = B' Rz(α) (e_z × x), y'' = B' Rz(α) (e_z × (e_z × x)).
  const Eigen::Matrix3d rot = base * rotation_z(best_alpha);
  const Eigen::Vector3d ez = Eigen::Vector3d::UnitZ();
  double g = 0.0, h = 0.0;
  for (const auto& x : samples) {
    const Eigen::Vector3d y = (rot * x + p2.translation) - p1.apply(x);
    const Eigen::Vector3d d1 = rot * ez.cross(x);
    const Eigen::Vector3d d2 = rot * ez.cross(ez.cross(x));
    g += y.dot(d1);
    h += d1.squaredNorm() + y.dot(d2);
  }
  if (h > 0.0) {
    const double polished = f(best_alpha - g / h);
    best = std::min(best, polished);
  }
  return best;
}

}  // namespace

double distance_bruteforce(const Pose& p1, const Pose& p2, const ObjectModel& object,
                           std::span<const Eigen::Vector3d> samples, int angular_steps) {
  if (samples.empty()) throw DataError("empty sample set");
  double best = std::numeric_limits<double>::infinity();
  switch (object.symmetry_class()) {
    case SymmetryClass::finite:
      for (const auto& g : object.group().rotations) {
        best = std::min(best, mean_squared_displacement(p1, p2.rotation * g,
                                                        p2.translation, samples));
      }
      break;
    case SymmetryClass::revolution_rotoreflection:
      best = revolution_branch(p1, p2, rotation_x(std::numbers::pi), samples, angular_steps);
      [[fallthrough]];
    case SymmetryClass::revolution:
      best = std::min(best, revolution_branch(p1, p2, Eigen::Matrix3d::Identity(), samples,
                                              angular_steps));
      break;
    case SymmetryClass::spherical:
      best = mean_squared_displacement(
          p1, p2.rotation * (p2.rotation.transpose() * p1.rotation), p2.translation, samples);
      break;
  }
  return std::sqrt(best);
}

// ---------------------------------------------------------------------------

namespace {

double adi_one_way(const Pose& p1, const Pose& p2, std::span<const Eigen::Vector3d> vertices,
                   int stride) {
  std::vector<double> target;
  for (std::size_t i = 0; i < vertices.size(); i += stride) {
    const Eigen::Vector3d y = p2.apply(vertices[i]);
    target.insert(target.end(), {y.x(), y.y(), y.z()});
  }
  const KdTree tree(target, 3, 16);
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < vertices.size(); i += stride) {
    const Eigen::Vector3d y = p1.apply(vertices[i]);
    const double q[3] = {y.x(), y.y(), y.z()};
    acc += std::sqrt(tree.nearest(q).squared_distance);
    ++n;
  }
  return acc / static_cast<double>(n);
}

}  // namespace

double adi_dissimilarity(const Pose& p1, const Pose& p2,
                         std::span<const Eigen::Vector3d> vertices, AdiDirection direction,
                         int stride) {
  if (vertices.empty()) throw DataError("empty mesh");
  if (stride < 1) throw UsageError("ADI subsample stride must be >= 1");
  switch (direction) {
    case AdiDirection::forward: return adi_one_way(p1, p2, vertices, stride);
    case AdiDirection::backward: return adi_one_way(p2, p1, vertices, stride);
    case AdiDirection::symmetric:
      return std::max(adi_one_way(p1, p2, vertices, stride),
                      adi_one_way(p2, p1, vertices, stride));
  }
  return 0.0;
}

}  // namespace posesym
