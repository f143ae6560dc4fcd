// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "ism/geometry.hpp"

namespace ism {

/// Axis-aligned box (2D or 3D).
struct Box {
  Vec lo;
  Vec hi;
};

/// Closed-form mirror lattice of an axis-aligned rectangular room: all image
/// positions of s with total reflection order <= max_order, by direct lattice
/// enumeration.  No path search is involved; this is the independent
/// reference the enumeration engine is checked against.
std::vector<std::pair<Vec, int>> rect_lattice_images(const Box& room, const Vec& s,
                                                     int max_order);

struct Arrival {
  double time = 0;   // seconds
  int bounces = 0;   // reflections before the capturing segment
};

/// Forward brute-force reference: shoots uniformly distributed rays from s,
/// reflects them specularly off the boundary, and records the times at which
/// a ray segment passes within capture_radius of r.  Built-in curved patches
/// are intersected analytically; expression curves by sampled bisection.
std::vector<Arrival> ray_shoot(const Boundary& boundary, const Vec& s,
                               const Vec& r, int n_rays, int max_bounces,
                               double capture_radius, double c = 343.0,
                               int threads = 1);

}  // namespace ism
