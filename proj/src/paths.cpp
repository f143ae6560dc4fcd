// SPDX-License-Identifier: Apache-2.0
#include "ism/paths.hpp"

#include <algorithm>
#include <cmath>

namespace ism {

namespace {

std::vector<Vec> full_point_list(const ReflectionPath& path) {
  std::vector<Vec> pts;
  pts.reserve(path.bounces.size() + 2);
  pts.push_back(path.source);
  for (const auto& b : path.bounces) pts.push_back(b.point);
  pts.push_back(path.sink);
  return pts;
}

}  // namespace

double path_length(const ReflectionPath& path) {
  auto pts = full_point_list(path);
  double len = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    len += distance(pts[i], pts[i + 1]);
  return len;
}

ValidityResult check_validity(const ReflectionPath& path, const Boundary& boundary,
                              double tol) {
  auto pts = full_point_list(path);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (distance(pts[i], pts[i + 1]) <= tol)
      throw DegenerateSegmentError("consecutive path points coincide near " +
                                   pts[i].str());

  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < pts.size(); ++j) {
    const Vec& prev = pts[j - 1];
    const Vec& here = pts[j];
    const Vec& next = pts[j + 1];
    Vec n = boundary.element_vector_at(path.bounces[j - 1].element_id, here);
    Vec mirrored = symmetric_project(prev, here, n);
    // |here - mirrored| = |here - prev| > tol, so both directions exist.
    Vec out_dir = (next - here).normalized();
    Vec ref_dir = (here - mirrored).normalized();
    worst = std::max(worst, (out_dir - ref_dir).norm());
  }
  return {worst <= tol, worst};
}

double check_equal_angles(const ReflectionPath& path, const Boundary& boundary) {
  auto pts = full_point_list(path);
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < pts.size(); ++j) {
    Vec n = boundary.element_vector_at(path.bounces[j - 1].element_id, pts[j]);
    Vec in_dir = (pts[j] - pts[j - 1]).normalized();
    Vec out_dir = (pts[j + 1] - pts[j]).normalized();
    worst = std::max(worst, std::abs((in_dir + out_dir).dot(n)));
  }
  return worst;
}

namespace {

// Transversal segment-wall crossing with the open-interval endpoint rule.
// Returns true when the open segment (a,b) pierces the wall's extent.
bool segment_crosses_wall(const Vec& a, const Vec& b, const PlanarWall& wall,
                          double tol, bool* grazing) {
  Vec d = b - a;
  double len = d.norm();
  if (len <= tol) return false;
  double along = wall.normal().dot(d);
  if (std::abs(along) <= 1e-12 * len) {
    // Segment parallel to the wall plane.  If it lies inside the plane and
    // touches the extent, that is a grazing contact: visible by definition.
    if (wall.plane_distance(a) <= tol) {
      for (int k = 1; k < 8; ++k)
        if (wall.contains(a + d * (k / 8.0), tol)) {
          *grazing = true;
          break;
        }
    }
    return false;
  }
  double lambda = (wall.offset() - wall.normal().dot(a)) / along;
  double delta = tol / len;
  if (lambda <= delta || lambda >= 1.0 - delta) return false;
  Vec hit = a + d * lambda;
  return wall.contains(hit, tol);
}

}  // namespace

VisibilityResult check_visibility(const ReflectionPath& path,
                                  const Boundary& boundary, double tol) {
  auto pts = full_point_list(path);
  VisibilityResult res;

  for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
    const Vec& a = pts[j];
    const Vec& b = pts[j + 1];
    Vec d = b - a;
    double len = d.norm();
    if (len <= tol) continue;
    Vec dir = d.normalized();

    for (const auto& wall : boundary.walls()) {
      if (segment_crosses_wall(a, b, wall, tol, &res.grazing)) {
        res.visible = false;
        res.blocking_element = wall.id();
        return res;
      }
    }

    for (const auto& p : boundary.points()) {
      double lam;
      double dist = point_segment_distance(p.position, a, b, &lam);
      double delta = tol / len;
      if (dist <= tol && lam > delta && lam < 1.0 - delta) {
        if (std::abs(p.vector.dot(dir)) > tol) {
          res.visible = false;
          res.blocking_element = p.id;
          return res;
        }
        res.grazing = true;
      }
    }

    for (const auto& patch : boundary.patches()) {
      for (const auto& s : boundary.patch_samples(patch.id())) {
        // Samples indistinguishable from the segment endpoints at lattice
        // resolution must not block: the endpoint exclusion window scales
        // with the sampling, not just with tol.
        if (distance(s.point, a) <= 2 * s.eps || distance(s.point, b) <= 2 * s.eps)
          continue;
        double lam;
        double dist = point_segment_distance(s.point, a, b, &lam);
        if (dist > s.eps) continue;
        if (lam <= 0.0 || lam >= 1.0) continue;
        if (std::abs(s.vector.dot(dir)) > tol) {
          res.visible = false;
          res.blocking_element = patch.id();
          return res;
        }
        res.grazing = true;
      }
    }
  }
  return res;
}

PathClassification classify_path(const ReflectionPath& path,
                                 const Boundary& boundary, double tol) {
  PathClassification c;
  auto v = check_validity(path, boundary, tol);
  c.valid = v.valid;
  c.validity_residual = v.residual;
  auto vis = check_visibility(path, boundary, tol);
  c.visible = vis.visible;
  c.blocking_element = vis.blocking_element;
  c.grazing = vis.grazing;
  return c;
}

}  // namespace ism
