// SPDX-License-Identifier: Apache-2.0
#include "ism/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace ism {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace

Vec compose_projections(const Vec& source,
                        const std::vector<std::pair<Vec, Vec>>& reflections) {
  Vec u = source;
  for (const auto& [point, vector] : reflections)
    u = symmetric_project(u, point, vector);
  return u;
}

// ---------------------------------------------------------------------------
// PlanarWall
// ---------------------------------------------------------------------------

PlanarWall PlanarWall::make(std::vector<Vec> vertices, std::optional<Vec> normal,
                            double absorption, int id) {
  require(!vertices.empty(), "wall has no vertices");
  const int dim = vertices[0].dim();
  require(dim == 2 || dim == 3, "wall vertices must be 2D or 3D");
  for (const Vec& v : vertices) {
    require(v.dim() == dim, "wall vertices mix dimensions");
    require(v.finite(), "wall vertex has non-finite coordinate");
  }
  require(absorption >= 0.0 && absorption <= 1.0,
          "wall absorption outside [0,1]");

  PlanarWall w;
  w.vertices_ = std::move(vertices);
  w.absorption_ = absorption;
  w.id_ = id;

  if (dim == 2) {
    require(w.vertices_.size() >= 2, "2D wall needs at least two vertices");
    Vec d = w.vertices_.back() - w.vertices_.front();
    require(d.norm() > kGeomTol, "2D wall endpoints coincide");
    if (normal) {
      require(normal->dim() == 2, "wall normal dimension mismatch");
      w.normal_ = normal->normalized();
      require(w.normal_.norm() > 0.5, "wall normal is zero");
    } else {
      w.normal_ = perp2(d).normalized();
    }
    require(std::abs(w.normal_.dot(d.normalized())) <= 1e-9,
            "wall normal is not orthogonal to the wall segment");
    w.tangent_ = perp2(w.normal_);
    w.offset_ = w.normal_.dot(w.vertices_.front());
    w.t_lo_ = std::numeric_limits<double>::infinity();
    w.t_hi_ = -std::numeric_limits<double>::infinity();
    for (const Vec& v : w.vertices_) {
      require(std::abs(w.normal_.dot(v) - w.offset_) <= 1e-9,
              "wall vertex off the wall line");
      double t = w.tangent_.dot(v);
      w.t_lo_ = std::min(w.t_lo_, t);
      w.t_hi_ = std::max(w.t_hi_, t);
    }
    require(w.t_hi_ - w.t_lo_ > kGeomTol,
            "wall extent has empty interior (isolated point)");
    return w;
  }

  // 3D: convex polygon.
  require(w.vertices_.size() >= 3, "3D wall needs at least three vertices");
  if (normal) {
    require(normal->dim() == 3, "wall normal dimension mismatch");
    w.normal_ = normal->normalized();
    require(w.normal_.norm() > 0.5, "wall normal is zero");
  } else {
    // Newell's method.
    Vec n(0, 0, 0);
    const auto& vs = w.vertices_;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const Vec& a = vs[i];
      const Vec& b = vs[(i + 1) % vs.size()];
      n = n + Vec((a.y() - b.y()) * (a.z() + b.z()),
                  (a.z() - b.z()) * (a.x() + b.x()),
                  (a.x() - b.x()) * (a.y() + b.y()));
    }
    require(n.norm() > kGeomTol, "wall vertices are collinear");
    w.normal_ = n.normalized();
  }
  w.offset_ = w.normal_.dot(w.vertices_.front());
  for (const Vec& v : w.vertices_)
    require(std::abs(w.normal_.dot(v) - w.offset_) <= 1e-9,
            "wall vertex off the wall plane");

  // In-plane basis and 2D polygon coordinates.
  w.e1_ = (w.vertices_[1] - w.vertices_[0]).normalized();
  w.e2_ = cross3(w.normal_, w.e1_);
  for (const Vec& v : w.vertices_) {
    Vec d = v - w.vertices_[0];
    w.poly_.push_back({d.dot(w.e1_), d.dot(w.e2_)});
  }

  // Convexity and nonempty interior: consistent turn signs, positive area.
  double area2 = 0;
  int sign = 0;
  const std::size_t n = w.poly_.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto& a = w.poly_[i];
    auto& b = w.poly_[(i + 1) % n];
    auto& c = w.poly_[(i + 2) % n];
    double turn = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
    if (std::abs(turn) > 1e-12) {
      int s = turn > 0 ? 1 : -1;
      require(sign == 0 || s == sign, "wall polygon is not convex");
      sign = s;
    }
    area2 += a[0] * b[1] - a[1] * b[0];
  }
  require(std::abs(area2) > kGeomTol, "wall polygon has empty interior");
  // The inset test assumes counterclockwise orientation; the stored vertex
  // list keeps the author's order.
  if (sign < 0) std::reverse(w.poly_.begin(), w.poly_.end());
  return w;
}

namespace {

// Signed distances of a 2D point to polygon edges (counterclockwise polygon:
// positive = inside).  Returns the minimum over edges.
double polygon_inset(const std::vector<std::array<double, 2>>& poly, double px,
                     double py) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    double ex = b[0] - a[0], ey = b[1] - a[1];
    double len = std::hypot(ex, ey);
    if (len < 1e-300) continue;
    double d = ((px - a[0]) * ey - (py - a[1]) * ex) / len;  // right of edge
    best = std::min(best, -d);
  }
  return best;
}

}  // namespace

Vec PlanarWall::nearest_point(const Vec& u) const {
  if (dim() == 2) {
    double t = std::clamp(tangent_.dot(u), t_lo_, t_hi_);
    return tangent_ * t + normal_ * offset_;
  }
  Vec d = u - vertices_[0];
  double px = d.dot(e1_), py = d.dot(e2_);
  if (polygon_inset(poly_, px, py) >= 0)
    return u - normal_ * (normal_.dot(u) - offset_);
  // project to the closest edge point
  double best = std::numeric_limits<double>::infinity();
  double bx = 0, by = 0;
  const std::size_t n = poly_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly_[i];
    const auto& b = poly_[(i + 1) % n];
    double ex = b[0] - a[0], ey = b[1] - a[1];
    double len2 = ex * ex + ey * ey;
    double lambda = len2 > 0
        ? std::clamp(((px - a[0]) * ex + (py - a[1]) * ey) / len2, 0.0, 1.0)
        : 0.0;
    double cx = a[0] + lambda * ex, cy = a[1] + lambda * ey;
    double dd = std::hypot(px - cx, py - cy);
    if (dd < best) {
      best = dd;
      bx = cx;
      by = cy;
    }
  }
  return vertices_[0] + e1_ * bx + e2_ * by;
}

double PlanarWall::extent_distance(const Vec& u) const {
  return distance(u, nearest_point(u));
}

bool PlanarWall::contains(const Vec& u, double tol) const {
  return extent_distance(u) <= tol;
}

bool PlanarWall::interior_contains(const Vec& u, double tol) const {
  if (plane_distance(u) > tol) return false;
  if (dim() == 2) {
    double t = tangent_.dot(u);
    return t >= t_lo_ + tol && t <= t_hi_ - tol;
  }
  Vec d = u - vertices_[0];
  return polygon_inset(poly_, d.dot(e1_), d.dot(e2_)) >= tol;
}

// ---------------------------------------------------------------------------
// CurvedPatch
// ---------------------------------------------------------------------------

CurvedPatch CurvedPatch::make_circle(const Vec& center, double radius,
                                     double arc_begin, double arc_end,
                                     double absorption, int id, int lattice_M) {
  require(center.dim() == 2, "circle center must be 2D");
  require(radius > 0, "circle radius must be positive");
  require(arc_end > arc_begin && arc_end - arc_begin <= 2 * kPi + 1e-12,
          "circle arc range invalid");
  CurvedPatch p;
  p.kind_ = PatchKind::circle;
  p.space_dim_ = 2;
  p.param_dim_ = 1;
  p.center_ = center;
  p.radius_ = radius;
  p.lo_ = {arc_begin, 0};
  p.hi_ = {arc_end, 0};
  p.absorption_ = absorption;
  p.id_ = id;
  p.lattice_M_ = lattice_M;
  p.validate();
  return p;
}

CurvedPatch CurvedPatch::make_sphere(const Vec& center, double radius,
                                     double cap_polar_angle, double absorption,
                                     int id, int lattice_M) {
  require(center.dim() == 3, "sphere center must be 3D");
  require(radius > 0, "sphere radius must be positive");
  require(cap_polar_angle > 0 && cap_polar_angle <= kPi + 1e-12,
          "sphere cap angle invalid");
  CurvedPatch p;
  p.kind_ = PatchKind::sphere;
  p.space_dim_ = 3;
  p.param_dim_ = 2;
  p.center_ = center;
  p.radius_ = radius;
  p.lo_ = {0, 0};                      // polar, azimuth
  p.hi_ = {cap_polar_angle, 2 * kPi};  // open box keeps poles/seam out
  p.absorption_ = absorption;
  p.id_ = id;
  p.lattice_M_ = lattice_M;
  p.validate();
  return p;
}

CurvedPatch CurvedPatch::make_cylinder(const Vec& axis_base, const Vec& axis_dir,
                                       double radius, double height,
                                       double absorption, int id,
                                       int lattice_M) {
  require(axis_base.dim() == 3 && axis_dir.dim() == 3,
          "cylinder axis must be 3D");
  require(radius > 0 && height > 0, "cylinder radius/height must be positive");
  CurvedPatch p;
  p.kind_ = PatchKind::cylinder;
  p.space_dim_ = 3;
  p.param_dim_ = 2;
  p.axis_base_ = axis_base;
  p.axis_dir_ = axis_dir.normalized();
  require(p.axis_dir_.norm() > 0.5, "cylinder axis direction is zero");
  // Any orthonormal pair completing the axis.
  Vec seed = std::abs(p.axis_dir_.x()) < 0.9 ? Vec(1, 0, 0) : Vec(0, 1, 0);
  p.e1_ = cross3(p.axis_dir_, seed).normalized();
  p.e2_ = cross3(p.axis_dir_, p.e1_);
  p.radius_ = radius;
  p.height_ = height;
  p.lo_ = {0, 0};            // azimuth, axial
  p.hi_ = {2 * kPi, height};
  p.absorption_ = absorption;
  p.id_ = id;
  p.lattice_M_ = lattice_M;
  p.validate();
  return p;
}

CurvedPatch CurvedPatch::make_param_curve(const ParamTables& tables, double t_lo,
                                          double t_hi, double absorption, int id,
                                          int lattice_M) {
  require(t_hi > t_lo, "param curve domain is empty");
  require(tables.poly.size() == 2 || tables.cos_coef.size() == 2 ||
              tables.sin_coef.size() == 2,
          "param curve tables must define two output coordinates");
  CurvedPatch p;
  p.kind_ = PatchKind::param_curve;
  p.space_dim_ = 2;
  p.param_dim_ = 1;
  p.tables_ = tables;
  p.tables_.poly.resize(2);
  p.tables_.cos_coef.resize(2);
  p.tables_.sin_coef.resize(2);
  p.lo_ = {t_lo, 0};
  p.hi_ = {t_hi, 0};
  p.absorption_ = absorption;
  p.id_ = id;
  p.lattice_M_ = lattice_M;
  p.validate();
  return p;
}

Vec CurvedPatch::eval(const std::array<double, 2>& t) const {
  switch (kind_) {
    case PatchKind::circle:
      return center_ + Vec(std::cos(t[0]), std::sin(t[0])) * radius_;
    case PatchKind::sphere: {
      double st = std::sin(t[0]), ct = std::cos(t[0]);
      return center_ + Vec(st * std::cos(t[1]), st * std::sin(t[1]), ct) * radius_;
    }
    case PatchKind::cylinder:
      return axis_base_ + (e1_ * std::cos(t[0]) + e2_ * std::sin(t[0])) * radius_ +
             axis_dir_ * t[1];
    case PatchKind::param_curve: {
      double x[2] = {0, 0};
      for (int i = 0; i < 2; ++i) {
        double pw = 1.0;
        for (double c : tables_.poly[i]) {
          x[i] += c * pw;
          pw *= t[0];
        }
        for (std::size_t k = 0; k < tables_.cos_coef[i].size(); ++k)
          x[i] += tables_.cos_coef[i][k] *
                  std::cos(static_cast<double>(k) * tables_.omega * t[0]);
        for (std::size_t k = 0; k < tables_.sin_coef[i].size(); ++k)
          x[i] += tables_.sin_coef[i][k] *
                  std::sin(static_cast<double>(k) * tables_.omega * t[0]);
      }
      return Vec(x[0], x[1]);
    }
  }
  return Vec();
}

std::array<Vec, 2> CurvedPatch::tangents(const std::array<double, 2>& t) const {
  switch (kind_) {
    case PatchKind::circle:
      return {Vec(-std::sin(t[0]), std::cos(t[0])) * radius_, Vec()};
    case PatchKind::sphere: {
      double st = std::sin(t[0]), ct = std::cos(t[0]);
      double cp = std::cos(t[1]), sp = std::sin(t[1]);
      return {Vec(ct * cp, ct * sp, -st) * radius_,
              Vec(-st * sp, st * cp, 0.0) * radius_};
    }
    case PatchKind::cylinder:
      return {(e2_ * std::cos(t[0]) - e1_ * std::sin(t[0])) * radius_, axis_dir_};
    case PatchKind::param_curve: {
      double x[2] = {0, 0};
      for (int i = 0; i < 2; ++i) {
        double pw = 1.0;
        for (std::size_t k = 1; k < tables_.poly[i].size(); ++k) {
          x[i] += static_cast<double>(k) * tables_.poly[i][k] * pw;
          pw *= t[0];
        }
        for (std::size_t k = 1; k < tables_.cos_coef[i].size(); ++k) {
          double w = static_cast<double>(k) * tables_.omega;
          x[i] -= tables_.cos_coef[i][k] * w * std::sin(w * t[0]);
        }
        for (std::size_t k = 1; k < tables_.sin_coef[i].size(); ++k) {
          double w = static_cast<double>(k) * tables_.omega;
          x[i] += tables_.sin_coef[i][k] * w * std::cos(w * t[0]);
        }
      }
      return {Vec(x[0], x[1]), Vec()};
    }
  }
  return {Vec(), Vec()};
}

Vec CurvedPatch::normal(const std::array<double, 2>& t) const {
  switch (kind_) {
    case PatchKind::circle:
      return Vec(std::cos(t[0]), std::sin(t[0]));
    case PatchKind::sphere:
      return (eval(t) - center_).normalized();
    case PatchKind::cylinder:
      return e1_ * std::cos(t[0]) + e2_ * std::sin(t[0]);
    case PatchKind::param_curve:
      return perp2(tangents(t)[0]).normalized();
  }
  return Vec();
}

double CurvedPatch::jacobian_factor(const std::array<double, 2>& t) const {
  auto tg = tangents(t);
  if (param_dim_ == 1) return tg[0].norm();
  double a = tg[0].dot(tg[0]);
  double b = tg[0].dot(tg[1]);
  double c = tg[1].dot(tg[1]);
  double det = a * c - b * b;
  return det > 0 ? std::sqrt(det) : 0.0;
}

std::pair<double, std::array<double, 2>> CurvedPatch::nearest(const Vec& u) const {
  auto clamp_angle = [](double a, double lo, double hi) {
    // wrap a into [lo, lo + 2*pi), then clamp to [lo, hi]
    double w = std::fmod(a - lo, 2 * kPi);
    if (w < 0) w += 2 * kPi;
    double t = lo + w;
    if (t > hi) {
      // closer to which end of the arc (angularly)?
      double over = t - hi;
      double under = 2 * kPi - w;
      t = over < under ? hi : lo;
    }
    return t;
  };

  switch (kind_) {
    case PatchKind::circle: {
      Vec d = u - center_;
      double theta = std::atan2(d.y(), d.x());
      std::array<double, 2> t{clamp_angle(theta, lo_[0], hi_[0]), 0};
      return {distance(u, eval(t)), t};
    }
    case PatchKind::sphere: {
      Vec d = u - center_;
      double rxy = std::hypot(d.x(), d.y());
      double polar = std::atan2(rxy, d.z());
      double azim = std::atan2(d.y(), d.x());
      if (azim < 0) azim += 2 * kPi;
      std::array<double, 2> t{std::clamp(polar, lo_[0], hi_[0]),
                              std::clamp(azim, lo_[1], hi_[1])};
      return {distance(u, eval(t)), t};
    }
    case PatchKind::cylinder: {
      Vec d = u - axis_base_;
      double z = std::clamp(d.dot(axis_dir_), lo_[1], hi_[1]);
      double a1 = d.dot(e1_), a2 = d.dot(e2_);
      double phi = std::atan2(a2, a1);
      if (phi < 0) phi += 2 * kPi;
      std::array<double, 2> t{std::clamp(phi, lo_[0], hi_[0]), z};
      return {distance(u, eval(t)), t};
    }
    case PatchKind::param_curve: {
      // coarse scan plus golden-section refinement
      const int n = 257;
      double best_t = lo_[0], best_d = std::numeric_limits<double>::infinity();
      for (int i = 0; i <= n; ++i) {
        double t = lo_[0] + (hi_[0] - lo_[0]) * i / n;
        double d = distance(u, eval({t, 0}));
        if (d < best_d) {
          best_d = d;
          best_t = t;
        }
      }
      double h = (hi_[0] - lo_[0]) / n;
      double a = std::max(lo_[0], best_t - h), b = std::min(hi_[0], best_t + h);
      const double gr = (std::sqrt(5.0) - 1) / 2;
      double c = b - gr * (b - a), dpt = a + gr * (b - a);
      for (int it = 0; it < 80 && (b - a) > 1e-13; ++it) {
        if (distance(u, eval({c, 0})) < distance(u, eval({dpt, 0}))) {
          b = dpt;
          dpt = c;
          c = b - gr * (b - a);
        } else {
          a = c;
          c = dpt;
          dpt = a + gr * (b - a);
        }
      }
      double t = 0.5 * (a + b);
      return {distance(u, eval({t, 0})), {t, 0}};
    }
  }
  return {std::numeric_limits<double>::infinity(), {0, 0}};
}

std::vector<std::array<double, 2>> CurvedPatch::lattice_params(int M) const {
  std::vector<std::array<double, 2>> out;
  const double h = 1.0 / M;
  auto axis_points = [&](double lo, double hi) {
    std::vector<double> ts;
    long k0 = static_cast<long>(std::floor(lo / h)) - 1;
    long k1 = static_cast<long>(std::ceil(hi / h)) + 1;
    for (long k = k0; k <= k1; ++k) {
      double t = k * h;
      if (t > lo && t < hi) ts.push_back(t);
    }
    return ts;
  };
  auto t0 = axis_points(lo_[0], hi_[0]);
  if (param_dim_ == 1) {
    for (double t : t0) out.push_back({t, 0});
    return out;
  }
  auto t1 = axis_points(lo_[1], hi_[1]);
  for (double a : t0)
    for (double b : t1) out.push_back({a, b});
  return out;
}

namespace {

// Nearest-neighbor distances via a uniform grid over the bounding box.
std::vector<double> nearest_neighbor_distances(const std::vector<Vec>& pts) {
  const std::size_t n = pts.size();
  std::vector<double> eps(n, std::numeric_limits<double>::infinity());
  if (n < 2) return eps;
  const int dim = pts[0].dim();

  Vec lo = pts[0], hi = pts[0];
  for (const Vec& p : pts)
    for (int i = 0; i < dim; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  double diag = distance(lo, hi);
  double cell = std::max(diag / std::pow(static_cast<double>(n), 1.0 / dim), 1e-12);

  auto key_of = [&](const Vec& p) {
    long long k = 0;
    for (int i = 0; i < dim; ++i) {
      long long c = static_cast<long long>(std::floor((p[i] - lo[i]) / cell));
      k = k * 73856093LL + c;
    }
    return k;
  };
  std::unordered_map<long long, std::vector<std::size_t>> grid;
  grid.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) grid[key_of(pts[i])].push_back(i);

  auto cells_around = [&](const Vec& p, int ring) {
    std::vector<long long> keys;
    std::array<long long, 3> base{};
    for (int i = 0; i < dim; ++i)
      base[static_cast<std::size_t>(i)] =
          static_cast<long long>(std::floor((p[i] - lo[i]) / cell));
    if (dim == 2) {
      for (long long dx = -ring; dx <= ring; ++dx)
        for (long long dy = -ring; dy <= ring; ++dy)
          keys.push_back((base[0] + dx) * 73856093LL + (base[1] + dy));
    } else {
      for (long long dx = -ring; dx <= ring; ++dx)
        for (long long dy = -ring; dy <= ring; ++dy)
          for (long long dz = -ring; dz <= ring; ++dz)
            keys.push_back(((base[0] + dx) * 73856093LL + (base[1] + dy)) *
                               73856093LL +
                           (base[2] + dz));
    }
    return keys;
  };

  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int ring = 1; ring <= 64; ring *= 2) {
      for (long long k : cells_around(pts[i], ring)) {
        auto it = grid.find(k);
        if (it == grid.end()) continue;
        for (std::size_t j : it->second) {
          if (j == i) continue;
          best = std::min(best, distance(pts[i], pts[j]));
        }
      }
      if (best <= ring * cell) break;  // no closer point can hide outside
    }
    if (!std::isfinite(best)) {  // degenerate grid; brute force
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) best = std::min(best, distance(pts[i], pts[j]));
    }
    eps[i] = best;
  }
  return eps;
}

}  // namespace

std::vector<PatchSample> CurvedPatch::lattice_samples(int M) const {
  auto params = lattice_params(M);
  std::vector<Vec> pts;
  pts.reserve(params.size());
  for (const auto& t : params) pts.push_back(eval(t));
  auto eps = nearest_neighbor_distances(pts);

  std::vector<PatchSample> out;
  out.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (eps[i] < 1e-9 && std::isfinite(eps[i]))
      throw InjectivityViolationError(
          "patch id " + std::to_string(id_) +
          ": two lattice samples map within 1e-9 of each other");
    double e = eps[i];
    if (!std::isfinite(e)) {
      // single sample: fall back to the mapped lattice spacing
      e = jacobian_factor(params[i]) > 0
              ? std::pow(jacobian_factor(params[i]), 1.0 / param_dim_) / M
              : 1.0 / M;
    }
    out.push_back({params[i], pts[i], normal(params[i]), e});
  }
  return out;
}

void CurvedPatch::validate() const {
  require(absorption_ >= 0.0 && absorption_ <= 1.0,
          "patch absorption outside [0,1]");
  require(lattice_M_ >= 2, "patch lattice density must be at least 2");
  // Injectivity and full rank, probed on a coarse grid.
  const int probe = 33;
  std::vector<Vec> pts;
  std::vector<std::array<double, 2>> ts;
  if (param_dim_ == 1) {
    for (int i = 1; i < probe; ++i) {
      double t = lo_[0] + (hi_[0] - lo_[0]) * i / probe;
      ts.push_back({t, 0});
    }
  } else {
    for (int i = 1; i < probe; ++i)
      for (int j = 1; j < probe; ++j)
        ts.push_back({lo_[0] + (hi_[0] - lo_[0]) * i / probe,
                      lo_[1] + (hi_[1] - lo_[1]) * j / probe});
  }
  for (const auto& t : ts) {
    require(jacobian_factor(t) > 1e-12,
            "patch map is rank-deficient at a probe point");
    pts.push_back(eval(t));
  }
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (distance(pts[i], pts[j]) < 1e-9)
        throw ValidationError("patch map is not injective (probe points " +
                              pts[i].str() + " repeats)");
}

// ---------------------------------------------------------------------------
// Boundary
// ---------------------------------------------------------------------------

Boundary::Boundary(std::vector<PlanarWall> walls, std::vector<CurvedPatch> patches,
                   std::vector<PointReflector> points)
    : walls_(std::move(walls)),
      patches_(std::move(patches)),
      points_(std::move(points)) {
  std::map<int, int> seen;
  auto check_id = [&](int id) {
    require(id >= 0, "element id must be nonnegative");
    require(!seen.count(id), "duplicate element id " + std::to_string(id));
    seen[id] = 1;
  };
  auto check_dim = [&](int d) {
    if (dim_ == 0) dim_ = d;
    require(dim_ == d, "boundary elements mix dimensions");
  };
  for (const auto& w : walls_) {
    check_id(w.id());
    check_dim(w.dim());
  }
  for (const auto& p : patches_) {
    check_id(p.id());
    check_dim(p.space_dim());
  }
  for (const auto& p : points_) {
    check_id(p.id);
    check_dim(p.position.dim());
    require(is_unit(p.vector, 1e-9), "point reflector vector is not unit");
    require(p.absorption >= 0 && p.absorption <= 1,
            "point reflector absorption outside [0,1]");
  }

  // Walls sharing a hyperplane must have disjoint extents; overlapping
  // duplicates would manufacture spurious coincident reflections.
  for (std::size_t i = 0; i < walls_.size(); ++i)
    for (std::size_t j = i + 1; j < walls_.size(); ++j) {
      const auto& a = walls_[i];
      const auto& b = walls_[j];
      if (!same_direction_unsigned(a.normal(), b.normal(), 1e-9)) continue;
      double sign = a.normal().dot(b.normal()) >= 0 ? 1.0 : -1.0;
      if (std::abs(a.offset() - sign * b.offset()) > kGeomTol) continue;
      for (const Vec& v : b.vertices())
        require(!a.interior_contains(v, kGeomTol),
                "walls " + std::to_string(a.id()) + " and " +
                    std::to_string(b.id()) + " overlap on one hyperplane");
      Vec mid = b.vertices()[0];
      for (std::size_t k = 1; k < b.vertices().size(); ++k)
        mid = mid + b.vertices()[k];
      mid = mid * (1.0 / static_cast<double>(b.vertices().size()));
      require(!a.interior_contains(mid, kGeomTol),
              "walls " + std::to_string(a.id()) + " and " +
                  std::to_string(b.id()) + " overlap on one hyperplane");
    }

  for (const auto& p : patches_)
    samples_.emplace(p.id(), p.lattice_samples(p.lattice_M()));
}

std::optional<Vec> Boundary::vector_field(const Vec& u, double tol) const {
  require(tol > 0, "vector_field tolerance must be positive");
  std::vector<Vec> hits;
  for (const auto& w : walls_)
    if (w.extent_distance(u) <= tol) hits.push_back(w.normal());
  for (const auto& p : points_)
    if (distance(p.position, u) <= tol) hits.push_back(p.vector);
  for (const auto& p : patches_) {
    auto [d, t] = p.nearest(u);
    if (d <= tol) hits.push_back(p.normal(t));
  }
  if (hits.empty()) return std::nullopt;
  for (std::size_t i = 1; i < hits.size(); ++i)
    if (!same_direction_unsigned(hits[0], hits[i], 1e-9))
      throw AmbiguousBoundaryError(
          "two boundary elements with different vectors within tolerance of " +
          u.str());
  return hits[0];
}

bool Boundary::has_element(int element_id) const {
  return wall_by_id(element_id) || patch_by_id(element_id) ||
         point_by_id(element_id);
}

const PlanarWall* Boundary::wall_by_id(int element_id) const {
  for (const auto& w : walls_)
    if (w.id() == element_id) return &w;
  return nullptr;
}

const CurvedPatch* Boundary::patch_by_id(int element_id) const {
  for (const auto& p : patches_)
    if (p.id() == element_id) return &p;
  return nullptr;
}

const PointReflector* Boundary::point_by_id(int element_id) const {
  for (const auto& p : points_)
    if (p.id == element_id) return &p;
  return nullptr;
}

Vec Boundary::element_vector_at(int element_id, const Vec& point) const {
  if (const auto* w = wall_by_id(element_id)) return w->normal();
  if (const auto* p = point_by_id(element_id)) return p->vector;
  if (const auto* p = patch_by_id(element_id))
    return p->normal(p->nearest(point).second);
  throw ValidationError("unknown element id " + std::to_string(element_id));
}

double Boundary::element_absorption(int element_id) const {
  if (const auto* w = wall_by_id(element_id)) return w->absorption();
  if (const auto* p = point_by_id(element_id)) return p->absorption;
  if (const auto* p = patch_by_id(element_id)) return p->absorption();
  throw ValidationError("unknown element id " + std::to_string(element_id));
}

const std::vector<PatchSample>& Boundary::patch_samples(int patch_id) const {
  auto it = samples_.find(patch_id);
  if (it == samples_.end())
    throw ValidationError("unknown patch id " + std::to_string(patch_id));
  return it->second;
}

bool Boundary::on_seam(const Vec& u, double tol, int exclude_wall_id) const {
  for (const auto& w : walls_) {
    if (w.id() == exclude_wall_id) {
      if (!w.interior_contains(u, tol)) return true;  // rim of the own wall
      continue;
    }
    if (w.extent_distance(u) <= tol) return true;  // touches another wall
  }
  return false;
}

}  // namespace ism
