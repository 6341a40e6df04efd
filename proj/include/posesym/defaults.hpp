// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#pragma once

#include <cstddef>

namespace posesym {

/// Match threshold δ as a fraction of the object diameter.
inline constexpr double kDefaultDeltaFraction = 0.1;
/// Occlusion threshold δ_o: instances with o(t) < δ_o are of interest.
inline constexpr double kDefaultOcclusionThreshold = 0.5;
/// Hypotheses kept by duplicate filtering (and mean-shift seeds).
inline constexpr std::size_t kDefaultKeep = 20;
/// Mean-shift modes closer than this fraction of the bandwidth are merged.
inline constexpr double kDefaultModeMergeFraction = 0.5;
/// Tolerance for group axioms on explicit rotation lists.
inline constexpr double kGroupTolerance = 1e-9;
/// APn limits reported by `evaluate`.
inline constexpr int kReportedApLimits[] = {1, 3};

inline constexpr int kFormatVersion = 1;

}  // namespace posesym
