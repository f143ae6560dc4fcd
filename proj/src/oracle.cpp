// SPDX-License-Identifier: Apache-2.0
#include "ism/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ism/parallel.hpp"

namespace ism {

namespace {

constexpr double kPi = std::numbers::pi;

// Per-axis 1D image positions of a room [0, L] (shifted coordinates) with
// their reflection counts: 2nL + s has order |2n|, 2nL - s has order |2n-1|.
std::vector<std::pair<double, int>> axis_images(double s, double length,
                                                int max_order) {
  std::vector<std::pair<double, int>> out;
  int n_max = max_order / 2 + 1;
  for (int n = -n_max; n <= n_max; ++n) {
    int order_plus = std::abs(2 * n);
    if (order_plus <= max_order)
      out.emplace_back(2.0 * n * length + s, order_plus);
    int order_minus = std::abs(2 * n - 1);
    if (order_minus <= max_order)
      out.emplace_back(2.0 * n * length - s, order_minus);
  }
  return out;
}

}  // namespace

std::vector<std::pair<Vec, int>> rect_lattice_images(const Box& room, const Vec& s,
                                                     int max_order) {
  const int dim = s.dim();
  if (room.lo.dim() != dim || room.hi.dim() != dim)
    throw ValidationError("room box dimension does not match the source");
  for (int i = 0; i < dim; ++i) {
    if (!(room.hi[i] - room.lo[i] > 0))
      throw ValidationError("room box has nonpositive side length");
    if (!(s[i] > room.lo[i] && s[i] < room.hi[i]))
      throw ValidationError("source is not strictly inside the room box");
  }

  std::vector<std::vector<std::pair<double, int>>> per_axis;
  for (int i = 0; i < dim; ++i)
    per_axis.push_back(
        axis_images(s[i] - room.lo[i], room.hi[i] - room.lo[i], max_order));

  std::vector<std::pair<Vec, int>> out;
  if (dim == 2) {
    for (const auto& [x, ox] : per_axis[0])
      for (const auto& [y, oy] : per_axis[1])
        if (ox + oy <= max_order)
          out.emplace_back(Vec(x + room.lo[0], y + room.lo[1]), ox + oy);
  } else {
    for (const auto& [x, ox] : per_axis[0])
      for (const auto& [y, oy] : per_axis[1])
        for (const auto& [z, oz] : per_axis[2])
          if (ox + oy + oz <= max_order)
            out.emplace_back(
                Vec(x + room.lo[0], y + room.lo[1], z + room.lo[2]),
                ox + oy + oz);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ray shooting
// ---------------------------------------------------------------------------

namespace {

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  Vec point;
  Vec vector;
  bool found = false;
};

void consider(Hit& best, double t, const Vec& point, const Vec& vector) {
  if (t > 1e-9 && t < best.t) {
    best.t = t;
    best.point = point;
    best.vector = vector;
    best.found = true;
  }
}

void intersect_wall(const Vec& p, const Vec& d, const PlanarWall& w, Hit& best) {
  double along = w.normal().dot(d);
  if (std::abs(along) <= 1e-14) return;
  double t = (w.offset() - w.normal().dot(p)) / along;
  if (t <= 1e-9 || t >= best.t) return;
  Vec hit = p + d * t;
  if (w.contains(hit, kGeomTol)) consider(best, t, hit, w.normal());
}

void intersect_circle_like(const Vec& p, const Vec& d, const CurvedPatch& patch,
                           Hit& best) {
  // Circle (2D) and sphere (3D): |p + t d - c| = R.
  Vec oc = p - patch.center();
  double b = oc.dot(d);
  double c = oc.squared_norm() - patch.radius() * patch.radius();
  double disc = b * b - c;
  if (disc < 0) return;
  double sq = std::sqrt(disc);
  for (double t : {-b - sq, -b + sq}) {
    if (t <= 1e-9 || t >= best.t) continue;
    Vec hit = p + d * t;
    auto [dist, param] = patch.nearest(hit);
    if (dist <= 1e-7) consider(best, t, hit, patch.normal(param));
  }
}

void intersect_cylinder(const Vec& p, const Vec& d, const CurvedPatch& patch,
                        Hit& best) {
  Vec ax = patch.axis_dir();
  Vec oc = p - patch.axis_base();
  Vec d_perp = d - ax * d.dot(ax);
  Vec oc_perp = oc - ax * oc.dot(ax);
  double a = d_perp.squared_norm();
  if (a <= 1e-300) return;
  double b = oc_perp.dot(d_perp) / a;
  double c = (oc_perp.squared_norm() - patch.radius() * patch.radius()) / a;
  double disc = b * b - c;
  if (disc < 0) return;
  double sq = std::sqrt(disc);
  for (double t : {-b - sq, -b + sq}) {
    if (t <= 1e-9 || t >= best.t) continue;
    Vec hit = p + d * t;
    auto [dist, param] = patch.nearest(hit);
    if (dist <= 1e-7) consider(best, t, hit, patch.normal(param));
  }
}

void intersect_param_curve(const Vec& p, const Vec& d, const CurvedPatch& patch,
                           Hit& best) {
  // Signed side of the ray line, bisected over a parameter grid.
  auto side = [&](double t) {
    Vec q = patch.eval({t, 0}) - p;
    return cross2(d, q);
  };
  const int n = 512;
  double lo = patch.domain_lo()[0], hi = patch.domain_hi()[0];
  double prev_t = lo + (hi - lo) * 1e-9;
  double prev_s = side(prev_t);
  for (int i = 1; i <= n; ++i) {
    double t1 = lo + (hi - lo) * i / n;
    double s1 = side(t1);
    if ((prev_s < 0) != (s1 < 0)) {
      double a = prev_t, b = t1;
      for (int it = 0; it < 80; ++it) {
        double m = 0.5 * (a + b);
        if ((side(a) < 0) != (side(m) < 0))
          b = m;
        else
          a = m;
      }
      double tm = 0.5 * (a + b);
      Vec hit = patch.eval({tm, 0});
      double along = (hit - p).dot(d);
      if (along > 1e-9 && along < best.t &&
          std::abs(cross2(d, hit - p)) < 1e-7)
        consider(best, along, hit, patch.normal({tm, 0}));
    }
    prev_t = t1;
    prev_s = s1;
  }
}

std::vector<Vec> ray_directions(int dim, int n_rays) {
  std::vector<Vec> dirs;
  dirs.reserve(static_cast<std::size_t>(n_rays));
  if (dim == 2) {
    for (int i = 0; i < n_rays; ++i) {
      double a = 2 * kPi * i / n_rays;
      dirs.emplace_back(std::cos(a), std::sin(a));
    }
  } else {
    // Fibonacci sphere: deterministic, close to uniform.
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n_rays; ++i) {
      double z = 1.0 - 2.0 * (i + 0.5) / n_rays;
      double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
      double a = golden * i;
      dirs.emplace_back(rad * std::cos(a), rad * std::sin(a), z);
    }
  }
  return dirs;
}

}  // namespace

std::vector<Arrival> ray_shoot(const Boundary& boundary, const Vec& s,
                               const Vec& r, int n_rays, int max_bounces,
                               double capture_radius, double c, int threads) {
  if (n_rays < 1000) throw ConfigError("ray_shoot needs at least 1000 rays");
  auto dirs = ray_directions(s.dim(), n_rays);

  auto trace = [&](std::size_t i) {
    std::vector<Arrival> arrivals;
    Vec p = s;
    Vec d = dirs[i];
    double traveled = 0;
    for (int bounce = 0; bounce <= max_bounces; ++bounce) {
      Hit best;
      for (const auto& w : boundary.walls()) intersect_wall(p, d, w, best);
      for (const auto& patch : boundary.patches()) {
        switch (patch.kind()) {
          case PatchKind::circle:
          case PatchKind::sphere:
            intersect_circle_like(p, d, patch, best);
            break;
          case PatchKind::cylinder:
            intersect_cylinder(p, d, patch, best);
            break;
          case PatchKind::param_curve:
            intersect_param_curve(p, d, patch, best);
            break;
        }
      }

      // Capture test on this segment (finite or extending to infinity).
      Vec to_r = r - p;
      double lam = to_r.dot(d);  // d is unit
      double seg_len = best.found ? best.t : std::numeric_limits<double>::infinity();
      if (lam > 0 && lam < seg_len) {
        double miss = (to_r - d * lam).norm();
        if (miss <= capture_radius)
          arrivals.push_back({(traveled + lam) / c, bounce});
      }

      if (!best.found) break;
      traveled += best.t;
      p = best.point;
      d = d - best.vector * (2.0 * d.dot(best.vector));
    }
    return arrivals;
  };

  auto per_ray = parallel_map<std::vector<Arrival>>(dirs.size(), threads, trace);
  std::vector<Arrival> out;
  for (const auto& v : per_ray) out.insert(out.end(), v.begin(), v.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const Arrival& a, const Arrival& b) { return a.time < b.time; });
  return out;
}

}  // namespace ism
