// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "posesym/object_model.hpp"
#include "posesym/pose.hpp"

namespace posesym {

/// The Euclidean embedding of a pose: a finite point set whose point-to-set
/// distance equals the pose distance.
///
///   finite:                      |G| points  vec(R G Λ) ⊕ t   (dim 12)
///   revolution:                  1 point     λ R e_z ⊕ t      (dim 6)
///   revolution_rotoreflection:   2 points    ±λ R e_z ⊕ t     (dim 6)
///   spherical:                   1 point     t                (dim 3)
///
/// vec() flattens row-major: entries (0,0), (0,1), (0,2), (1,0), ...
struct RepresentativeSet {
  int dim = 0;
  std::vector<double> coords;  // size() * dim values
  std::int64_t pose_id = -1;

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * dim, static_cast<std::size_t>(dim)};
  }
};

int representative_dim(SymmetryClass cls);

RepresentativeSet representatives(const Pose& pose, const ObjectModel& object,
                                  std::int64_t pose_id = -1);

/// Appends all representative points of `pose` to `out`.
void append_representatives(const Pose& pose, const ObjectModel& object,
                            std::vector<double>& out);

/// Writes the first representative (the one for G = I) into `out`, which
/// must hold representative_dim() values.
void first_representative(const Pose& pose, const ObjectModel& object, double* out);

/// Maps a point of representative space back to a pose by nearest-point
/// projection onto the embedding: SVD/Procrustes for the finite class,
/// renormalization of the axis for revolution classes, identity rotation
/// for the spherical class. Throws NumericalError("ambiguous mean") when the
/// projection is not unique.
Pose pose_from_representative(std::span<const double> point, const ObjectModel& object);

/// Symmetry-aware pose distance: min over q ∈ R(p2) of ‖q − p0‖ with p0 the
/// first representative of p1. Length units; the RMS displacement of surface
/// points along the smallest displacement between the two pose classes.
double distance(const Pose& p1, const Pose& p2, const ObjectModel& object);

/// Same as distance() but anchored on representative `anchor` of p1.
double distance_from_anchor(const Pose& p1, std::size_t anchor, const Pose& p2,
                            const ObjectModel& object);

/// Independent oracle: min over the symmetry group of the RMS displacement
/// sqrt((1/N) Σ ‖T₂G(xᵢ) − T₁(xᵢ)‖²) over the samples. Finite groups are
/// enumerated; revolution groups use an angular grid of `angular_steps`
/// followed by one Newton step (plus the flipped branch for rotoreflection);
/// spherical groups use G = R₂ᵀR₁. Throws DataError on empty samples.
double distance_bruteforce(const Pose& p1, const Pose& p2, const ObjectModel& object,
                           std::span<const Eigen::Vector3d> samples,
                           int angular_steps = 3600);

enum class AdiDirection {
  forward,    // avg over x1 of min over x2 ‖T1 x1 − T2 x2‖
  backward,   // roles of the poses swapped
  symmetric,  // max of both directions
};

/// Average closest-point distance between model vertices at two poses.
/// Vertices are taken every `stride` entries (1 = all).
double adi_dissimilarity(const Pose& p1, const Pose& p2,
                         std::span<const Eigen::Vector3d> vertices,
                         AdiDirection direction = AdiDirection::forward, int stride = 1);

}  // namespace posesym
