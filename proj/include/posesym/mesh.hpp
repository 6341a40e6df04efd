// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace posesym {

struct TriangleMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;
};

/// Throws DataError when an index is out of range or the total area is zero.
void check_mesh(const TriangleMesh& mesh);

double surface_area(const TriangleMesh& mesh);

/// Area-weighted mean of triangle centroids.
Eigen::Vector3d surface_centroid(const TriangleMesh& mesh);

/// (1/S) ∫ x xᵀ ds over the piecewise-linear surface, about the frame origin.
/// Per triangle with corners a, b, c and area A the integral is
/// A/12 (aaᵀ + bbᵀ + ccᵀ + (a+b+c)(a+b+c)ᵀ).
Eigen::Matrix3d surface_second_moment(const TriangleMesh& mesh);

/// Symmetric PSD square root via eigendecomposition. Eigenvalues in
/// [-1e-12·trace, 0) are clamped to zero; more negative ones throw.
Eigen::Matrix3d psd_sqrt(const Eigen::Matrix3d& m);

/// Λ = ((1/S) ∫ x xᵀ ds)^{1/2}. The mesh is expected to be centered on its
/// surface centroid.
Eigen::Matrix3d compute_lambda(const TriangleMesh& mesh);

/// ((1/N) Σ xᵢxᵢᵀ)^{1/2} over a discrete sample set, used when distances must
/// agree with a vertex-sampled RMS displacement.
Eigen::Matrix3d discrete_lambda(std::span<const Eigen::Vector3d> samples);

/// 2 · max vertex distance to `center`.
double diameter_about(const TriangleMesh& mesh, const Eigen::Vector3d& center);

TriangleMesh transformed(const TriangleMesh& mesh, const Eigen::Matrix3d& rotation,
                         const Eigen::Vector3d& translation);

/// PLY (ascii, binary_little_endian, binary_big_endian) or OBJ, chosen by
/// extension. Only triangular faces are accepted.
TriangleMesh load_mesh(const std::filesystem::path& path);
void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path);

// Primitive generators, used for fixtures and tests.
TriangleMesh make_box(double hx, double hy, double hz);
/// Icosahedron subdivided `levels` times and projected to the sphere.
TriangleMesh make_icosphere(double radius, int levels);
/// Closed cylinder along z, centered at the origin.
TriangleMesh make_cylinder(double radius, double height, int segments);
/// Surface of revolution along z from a polyline profile of (r, z) pairs,
/// capped at both ends when the end radius is nonzero.
TriangleMesh make_revolution(std::span<const Eigen::Vector2d> profile, int segments);

}  // namespace posesym
