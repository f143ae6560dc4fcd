// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ism/errors.hpp"
#include "ism/vec.hpp"

namespace ism {

constexpr double kGeomTol = 1e-9;

/// Mirror u across the hyperplane through v with unit vector n.
/// Total function; the result is invariant under n -> -n and preserves the
/// distance to v.
inline Vec symmetric_project(const Vec& u, const Vec& v, const Vec& n) {
  return u - n * (2.0 * (u - v).dot(n));
}

/// Left fold of symmetric projections in path order.  An empty list returns
/// the source unchanged.
Vec compose_projections(const Vec& source,
                        const std::vector<std::pair<Vec, Vec>>& reflections);

// ---------------------------------------------------------------------------
// Boundary elements
// ---------------------------------------------------------------------------

/// Finite flat wall: a convex polytope inside the hyperplane <n, x> = offset.
/// In 2D the extent is a segment (two endpoints); in 3D a convex polygon.
/// Walls reflect from both sides; the stored normal sign carries no meaning.
class PlanarWall {
 public:
  /// Builds a wall from its extent vertices.  When `normal` is empty it is
  /// inferred from the vertex winding (2D: left-hand normal of the segment;
  /// 3D: Newell's method).  Throws ValidationError if the vertices are not
  /// coplanar within 1e-9, not convex, or have empty relative interior.
  static PlanarWall make(std::vector<Vec> vertices, std::optional<Vec> normal,
                         double absorption, int id);

  const Vec& normal() const { return normal_; }
  double offset() const { return offset_; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  double absorption() const { return absorption_; }
  int id() const { return id_; }
  int dim() const { return normal_.dim(); }

  double plane_distance(const Vec& u) const {
    return std::abs(normal_.dot(u) - offset_);
  }

  /// Euclidean distance from u to the closed extent.
  double extent_distance(const Vec& u) const;

  /// Point lies on the closed extent (hyperplane and polytope), within tol.
  bool contains(const Vec& u, double tol) const;

  /// Point lies on the extent and at least tol away from the extent's
  /// relative boundary.  Seam points (wall edges) fail this test.
  bool interior_contains(const Vec& u, double tol) const;

  /// Closest point of the closed extent.
  Vec nearest_point(const Vec& u) const;

 private:
  Vec normal_;
  double offset_ = 0;
  std::vector<Vec> vertices_;
  double absorption_ = 1.0;
  int id_ = -1;

  // 2D extent: parameter range along tangent_.
  Vec tangent_;
  double t_lo_ = 0, t_hi_ = 0;
  // 3D extent: in-plane orthonormal basis and 2D polygon coordinates.
  Vec e1_, e2_;
  std::vector<std::array<double, 2>> poly_;
};

/// Isolated boundary point carrying an assigned unit vector.
struct PointReflector {
  Vec position;
  Vec vector;  // unit
  double absorption = 1.0;
  int id = -1;
};

/// Coefficient tables for an expression-based plane curve:
///   x_i(t) = sum_k poly[i][k] t^k
///          + sum_k cos_coef[i][k] cos(k*omega*t) + sin_coef[i][k] sin(k*omega*t)
struct ParamTables {
  std::vector<std::vector<double>> poly;
  std::vector<std::vector<double>> cos_coef;
  std::vector<std::vector<double>> sin_coef;
  double omega = 1.0;
};

enum class PatchKind { circle, sphere, cylinder, param_curve };

/// One lattice sample of a curved patch, used for membership and
/// visibility tests.  `eps` is the distance to the nearest other mapped
/// sample — the spatial resolution of the sampling around this point.
struct PatchSample {
  std::array<double, 2> param{0, 0};
  Vec point;
  Vec vector;
  double eps = 0;
};

/// Curved boundary piece given by a C^1 injective map from an open box
/// U in R^p (p < N) with an analytic field vector along the patch.
class CurvedPatch {
 public:
  static CurvedPatch make_circle(const Vec& center, double radius,
                                 double arc_begin, double arc_end,
                                 double absorption, int id, int lattice_M);
  static CurvedPatch make_sphere(const Vec& center, double radius,
                                 double cap_polar_angle, double absorption,
                                 int id, int lattice_M);
  static CurvedPatch make_cylinder(const Vec& axis_base, const Vec& axis_dir,
                                   double radius, double height,
                                   double absorption, int id, int lattice_M);
  static CurvedPatch make_param_curve(const ParamTables& tables, double t_lo,
                                      double t_hi, double absorption, int id,
                                      int lattice_M);

  PatchKind kind() const { return kind_; }
  int space_dim() const { return space_dim_; }
  int param_dim() const { return param_dim_; }
  double absorption() const { return absorption_; }
  int id() const { return id_; }
  int lattice_M() const { return lattice_M_; }
  std::array<double, 2> domain_lo() const { return lo_; }
  std::array<double, 2> domain_hi() const { return hi_; }

  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const Vec& axis_base() const { return axis_base_; }
  const Vec& axis_dir() const { return axis_dir_; }
  double height() const { return height_; }
  const ParamTables& tables() const { return tables_; }

  Vec eval(const std::array<double, 2>& t) const;
  /// Tangent vectors (columns of the derivative of the map).
  std::array<Vec, 2> tangents(const std::array<double, 2>& t) const;
  /// Assigned field vector at parameter t (unit).
  Vec normal(const std::array<double, 2>& t) const;
  /// sqrt(det(J^T J)): length/area scaling of the map at t.
  double jacobian_factor(const std::array<double, 2>& t) const;

  /// Distance from u to the patch and the parameter of the closest point.
  std::pair<double, std::array<double, 2>> nearest(const Vec& u) const;

  /// Lattice points of spacing 1/M strictly inside the domain box, mapped
  /// through the patch, with nearest-neighbor radii.  Throws
  /// InjectivityViolationError when two samples map within 1e-9.
  std::vector<PatchSample> lattice_samples(int M) const;

  /// Parameter-space lattice (spacing 1/M, strict interior of the box),
  /// without evaluation.  Exposed for quadrature code built on the same grid.
  std::vector<std::array<double, 2>> lattice_params(int M) const;

 private:
  CurvedPatch() = default;
  void validate() const;

  PatchKind kind_ = PatchKind::circle;
  int space_dim_ = 2;
  int param_dim_ = 1;
  std::array<double, 2> lo_{0, 0}, hi_{0, 0};
  Vec center_;
  double radius_ = 0;
  Vec axis_base_, axis_dir_;  // cylinder
  Vec e1_, e2_;               // basis orthogonal to the cylinder axis
  double height_ = 0;
  ParamTables tables_;
  double absorption_ = 1.0;
  int id_ = -1;
  int lattice_M_ = 256;
};

// ---------------------------------------------------------------------------
// Boundary
// ---------------------------------------------------------------------------

/// The full reflecting boundary: walls, curved patches, and point
/// reflectors.  Immutable after construction and safe to share across
/// threads.  Visibility sample tables for each patch are precomputed at the
/// patch's lattice density.
class Boundary {
 public:
  Boundary() = default;
  Boundary(std::vector<PlanarWall> walls, std::vector<CurvedPatch> patches,
           std::vector<PointReflector> points);

  const std::vector<PlanarWall>& walls() const { return walls_; }
  const std::vector<CurvedPatch>& patches() const { return patches_; }
  const std::vector<PointReflector>& points() const { return points_; }
  bool empty() const {
    return walls_.empty() && patches_.empty() && points_.empty();
  }
  int dim() const { return dim_; }

  /// The boundary's field vector at u: the assigned vector of the unique
  /// element within distance tol, or nullopt for points off the boundary.
  /// Throws AmbiguousBoundaryError when two elements with genuinely
  /// different vectors both match (vectors equal up to sign do not
  /// conflict).
  std::optional<Vec> vector_field(const Vec& u, double tol = kGeomTol) const;

  /// Assigned vector of a specific element at (or near) the given point.
  Vec element_vector_at(int element_id, const Vec& point) const;
  double element_absorption(int element_id) const;
  bool has_element(int element_id) const;
  const PlanarWall* wall_by_id(int element_id) const;
  const CurvedPatch* patch_by_id(int element_id) const;
  const PointReflector* point_by_id(int element_id) const;

  /// Precomputed lattice samples of a patch at its configured density.
  const std::vector<PatchSample>& patch_samples(int patch_id) const;

  /// True when u lies within tol of the closure of any wall other than
  /// `exclude_wall_id` or of any wall's extent boundary — the measure-zero
  /// seam set excluded from the wall decomposition.
  bool on_seam(const Vec& u, double tol, int exclude_wall_id) const;

 private:
  std::vector<PlanarWall> walls_;
  std::vector<CurvedPatch> patches_;
  std::vector<PointReflector> points_;
  std::unordered_map<int, std::vector<PatchSample>> samples_;
  int dim_ = 0;
};

}  // namespace ism
