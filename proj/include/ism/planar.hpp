// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "ism/paths.hpp"

namespace ism {

/// Infinite line through `anchor` with unit `direction`.
struct Line {
  Vec anchor;
  Vec direction;
};

/// Ordered wall ids a ray reflects off, source side first.  Consecutive ids
/// must differ; non-consecutive revisits are allowed.
using WallSequence = std::vector<int>;

/// A discrete image source together with the reflection path it explains.
struct VirtualSource {
  Vec position;
  int order = 0;
  ReflectionPath path;
  WallSequence walls;
  double validity_residual = 0.0;
  bool grazing = false;
};

/// Image of s mirrored through the listed walls' hyperplanes, in order.
/// Independent of any representative point chosen on each wall.
Vec image_of_source_through_walls(const Vec& s, const WallSequence& seq,
                                  const Boundary& boundary);

/// The k+1 lines containing a candidate reflection path for the given wall
/// sequence.  lines[0] joins the full forward image of s with r; lines[k]
/// joins s with the full backward image of r; interior lines join partial
/// images.  Lines are indexed from the receiver end: lines[k-j] contains the
/// j-th path segment.  Throws DegenerateLineError when a line's two defining
/// points coincide within tol.
std::vector<Line> build_lines(const Vec& s, const Vec& r, const WallSequence& seq,
                              const Boundary& boundary, double tol = kGeomTol);

/// Feasibility map: the unique candidate path whose j-th reflection point is
/// the single point of wall_j ∩ lines[k-j] ∩ lines[k-j+1], or nullopt when
/// any intersection is empty, not a single point, off the wall extent, on a
/// seam, or fails the law-of-reflection check.
std::optional<ReflectionPath> psi(const WallSequence& seq, const Vec& s,
                                  const Vec& r, const Boundary& boundary,
                                  double tol = kGeomTol);

/// All valid and visible image sources up to max_order, plus the order-0
/// direct source when (s, r) is visible.  Deterministic: sorted by
/// (order, wall sequence).
std::vector<VirtualSource> enumerate_virtual_sources(const Boundary& boundary,
                                                     const Vec& s, const Vec& r,
                                                     int max_order,
                                                     double tol = kGeomTol,
                                                     int threads = 1);

}  // namespace ism
