// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "ism/geometry.hpp"

namespace ism {

/// One reflection: where the path touches the boundary and on which element.
struct Bounce {
  Vec point;
  int element_id = -1;
};

/// Ordered tuple (source, reflection points, sink).  Consecutive points must
/// be distinct; every reflection point must lie on its element.
struct ReflectionPath {
  Vec source;
  std::vector<Bounce> bounces;
  Vec sink;

  int order() const { return static_cast<int>(bounces.size()); }
};

/// Sum of consecutive segment lengths (meters).
double path_length(const ReflectionPath& path);

struct ValidityResult {
  bool valid = false;
  /// Max over bounces of the norm of the direction mismatch between the
  /// outgoing segment and the mirrored incoming segment (dimensionless).
  double residual = 0.0;
};

/// Law-of-reflection test: at every bounce the unit vector toward the next
/// point must equal the unit vector from the mirrored previous point through
/// the bounce.  Throws DegenerateSegmentError when consecutive points
/// coincide within tol.
ValidityResult check_validity(const ReflectionPath& path, const Boundary& boundary,
                              double tol = kGeomTol);

/// Max over bounces of |<incident_dir + reflected_dir, field vector>| — zero
/// for any path obeying the law of reflection.
double check_equal_angles(const ReflectionPath& path, const Boundary& boundary);

struct VisibilityResult {
  bool visible = true;
  std::optional<int> blocking_element;
  /// Some open segment runs inside a wall's own hyperplane while touching
  /// its extent.  Such paths are visible (the inner product vanishes) but
  /// worth flagging in diagnostics.
  bool grazing = false;
};

/// Occlusion test: a path is visible when no open segment crosses the
/// boundary transversally.  Grazing contact (segment inside a wall's
/// hyperplane) does not block.  Segment endpoints are excluded so a bounce
/// never blocks its own segments.  Curved patches are tested against their
/// precomputed lattice samples: a segment passing within a sample's
/// resolution radius of it, away from the segment endpoints, is blocked
/// unless the sample vector is orthogonal to the segment.
VisibilityResult check_visibility(const ReflectionPath& path,
                                  const Boundary& boundary,
                                  double tol = kGeomTol);

struct PathClassification {
  bool valid = false;
  bool visible = false;
  double validity_residual = 0.0;
  std::optional<int> blocking_element;
  bool grazing = false;
};

PathClassification classify_path(const ReflectionPath& path,
                                 const Boundary& boundary,
                                 double tol = kGeomTol);

}  // namespace ism
