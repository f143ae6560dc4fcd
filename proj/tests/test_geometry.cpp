// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ism/geometry.hpp"

using namespace ism;

namespace {

Vec random_vec(std::mt19937_64& rng, int dim, double lo = -10, double hi = 10) {
  std::uniform_real_distribution<double> d(lo, hi);
  return dim == 2 ? Vec(d(rng), d(rng)) : Vec(d(rng), d(rng), d(rng));
}

Vec random_unit(std::mt19937_64& rng, int dim) {
  while (true) {
    Vec v = random_vec(rng, dim, -1, 1);
    if (v.norm() > 1e-3) return v.normalized();
  }
}

Boundary single_wall_boundary() {
  auto wall = PlanarWall::make({Vec(0, 0), Vec(1, 0)}, Vec(0, 1), 1.0, 0);
  return Boundary({wall}, {}, {});
}

}  // namespace

TEST_CASE("symmetric projection matches hand-computed mirrors") {
  // mirror across the vertical line x = 2
  Vec p1 = symmetric_project(Vec(0, 0), Vec(2, 0), Vec(1, 0));
  CHECK(distance(p1, Vec(4, 0)) < 1e-15);

  // mirror across the x-axis
  Vec p2 = symmetric_project(Vec(1, 1), Vec(0, 0), Vec(0, 1));
  CHECK(distance(p2, Vec(1, -1)) < 1e-15);

  // mirror across the line y = -x
  double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Vec p3 = symmetric_project(Vec(3, 4), Vec(0, 0), Vec(inv_sqrt2, inv_sqrt2));
  CHECK(distance(p3, Vec(-4, -3)) < 1e-12);
}

TEST_CASE("symmetric projection invariants hold on random inputs") {
  std::mt19937_64 rng(12345);
  for (int dim : {2, 3}) {
    for (int i = 0; i < 2000; ++i) {
      Vec u = random_vec(rng, dim);
      Vec v = random_vec(rng, dim);
      Vec n = random_unit(rng, dim);
      Vec p = symmetric_project(u, v, n);

      // isometry about the reflection point
      CHECK(std::abs(distance(p, v) - distance(u, v)) < 1e-12 * (1 + distance(u, v)));
      // involution
      CHECK(distance(symmetric_project(p, v, n), u) < 1e-12 * (1 + u.norm()));
      // sign independence is exact
      CHECK(p == symmetric_project(u, v, -n));
      // displacement parallel to the mirror vector
      Vec d = p - u;
      if (d.norm() > 1e-9) {
        double cosang = std::abs(d.normalized().dot(n));
        CHECK(cosang > 1.0 - 1e-10);
      }
    }
  }
}

TEST_CASE("compose_projections folds mirrors in order") {
  // single mirror at x = 0
  Vec one = compose_projections(Vec(0.3, 0.3), {{Vec(0, 0.5), Vec(1, 0)}});
  CHECK(distance(one, Vec(-0.3, 0.3)) < 1e-15);

  // empty list is the identity
  Vec none = compose_projections(Vec(0.3, 0.3), {});
  CHECK(none == Vec(0.3, 0.3));

  // two mirrors: x = 0 then y = 0
  Vec two = compose_projections(
      Vec(0.3, 0.3), {{Vec(0, 0.1), Vec(1, 0)}, {Vec(0.7, 0), Vec(0, 1)}});
  CHECK(distance(two, Vec(-0.3, -0.3)) < 1e-15);
}

TEST_CASE("vector_field answers on, off, and ambiguous points") {
  auto wall = PlanarWall::make({Vec(0, 0), Vec(1, 0)}, Vec(0, 1), 1.0, 0);
  PointReflector pr{Vec(2, 0), Vec(1, 0), 1.0, 1};
  Boundary b({wall}, {}, {pr});

  auto on_wall = b.vector_field(Vec(0.5, 0), 1e-9);
  REQUIRE(on_wall.has_value());
  CHECK(distance(*on_wall, Vec(0, 1)) < 1e-12);

  CHECK(!b.vector_field(Vec(0.5, 0.5), 1e-9).has_value());

  // isolated points carry their assigned vectors
  auto on_point = b.vector_field(Vec(2, 0), 1e-9);
  REQUIRE(on_point.has_value());
  CHECK(distance(*on_point, Vec(1, 0)) < 1e-12);

  // a second element with a different vector inside the tolerance ball
  PointReflector clash{Vec(0.5, 0.0), Vec(1, 0), 1.0, 2};
  Boundary b2({wall}, {}, {clash});
  CHECK_THROWS_AS(b2.vector_field(Vec(0.5, 0), 1e-6), AmbiguousBoundaryError);
  CHECK(b.vector_field(Vec(0.5, 0), 1e-9).has_value());
}

TEST_CASE("vector_field requires a positive tolerance") {
  auto b = single_wall_boundary();
  CHECK_THROWS_AS(b.vector_field(Vec(0.5, 0), 0.0), ValidationError);
}

TEST_CASE("wall construction validates its invariants") {
  // vertex off the stated plane
  CHECK_THROWS_AS(
      PlanarWall::make({Vec(0, 0), Vec(1, 0.1)}, Vec(0, 1), 1.0, 0),
      ValidationError);
  // isolated point is not a wall
  CHECK_THROWS_AS(PlanarWall::make({Vec(0, 0), Vec(0, 0)}, std::nullopt, 1.0, 0),
                  ValidationError);
  // absorption range
  CHECK_THROWS_AS(PlanarWall::make({Vec(0, 0), Vec(1, 0)}, std::nullopt, 1.5, 0),
                  ValidationError);
  // non-convex 3D polygon
  CHECK_THROWS_AS(
      PlanarWall::make({Vec(0, 0, 0), Vec(2, 0, 0), Vec(0.5, 0.5, 0),
                        Vec(0, 2, 0)},
                       std::nullopt, 1.0, 0),
      ValidationError);
}

TEST_CASE("2D wall normals are inferred from winding") {
  auto wall = PlanarWall::make({Vec(0, 0), Vec(1, 0)}, std::nullopt, 1.0, 0);
  CHECK(std::abs(std::abs(wall.normal().y()) - 1.0) < 1e-12);
  CHECK(std::abs(wall.offset()) < 1e-12);
}

TEST_CASE("3D wall polygon membership") {
  auto wall = PlanarWall::make(
      {Vec(0, 0, 0), Vec(2, 0, 0), Vec(2, 2, 0), Vec(0, 2, 0)}, std::nullopt,
      1.0, 0);
  CHECK(wall.contains(Vec(1, 1, 0), 1e-9));
  CHECK(wall.interior_contains(Vec(1, 1, 0), 1e-6));
  CHECK(!wall.contains(Vec(3, 1, 0), 1e-9));
  CHECK(!wall.contains(Vec(1, 1, 0.1), 1e-9));
  // rim points are on the closed extent but not the interior
  CHECK(wall.contains(Vec(0, 1, 0), 1e-9));
  CHECK(!wall.interior_contains(Vec(0, 1, 0), 1e-6));
}

TEST_CASE("boundary rejects duplicate ids and overlapping coplanar walls") {
  auto w0 = PlanarWall::make({Vec(0, 0), Vec(1, 0)}, std::nullopt, 1.0, 0);
  auto w0b = PlanarWall::make({Vec(0, 1), Vec(1, 1)}, std::nullopt, 1.0, 0);
  CHECK_THROWS_AS(Boundary({w0, w0b}, {}, {}), ValidationError);

  // same line, overlapping extents
  auto a = PlanarWall::make({Vec(0, 0), Vec(2, 0)}, std::nullopt, 1.0, 0);
  auto b = PlanarWall::make({Vec(1, 0), Vec(3, 0)}, std::nullopt, 1.0, 1);
  CHECK_THROWS_AS(Boundary({a, b}, {}, {}), ValidationError);

  // same line, disjoint extents: fine
  auto c = PlanarWall::make({Vec(3, 0), Vec(4, 0)}, std::nullopt, 1.0, 1);
  CHECK_NOTHROW(Boundary({a, c}, {}, {}));
}

TEST_CASE("circle patch evaluation, normals, and nearest point") {
  auto patch = CurvedPatch::make_circle(Vec(1, 1), 2.0, 0, 2 * 3.14159265358979,
                                        1.0, 0, 64);
  Vec p = patch.eval({0, 0});
  CHECK(distance(p, Vec(3, 1)) < 1e-12);
  CHECK(distance(patch.normal({0, 0}), Vec(1, 0)) < 1e-12);
  CHECK(patch.jacobian_factor({0, 0}) == doctest::Approx(2.0));

  auto [d, t] = patch.nearest(Vec(4, 1));
  CHECK(d == doctest::Approx(1.0));
  CHECK(distance(patch.eval(t), Vec(3, 1)) < 1e-9);
}

TEST_CASE("patch validation rejects rank-deficient and non-injective maps") {
  // constant map: zero tangent
  ParamTables constant;
  constant.poly = {{1.0}, {2.0}};
  CHECK_THROWS_AS(CurvedPatch::make_param_curve(constant, 0, 1, 1.0, 0, 16),
                  ValidationError);

  // a figure that retraces itself: cos(t) on (0, 2pi) for both coordinates
  ParamTables retrace;
  retrace.cos_coef = {{0, 1.0}, {0, 0}};
  retrace.poly = {{}, {0, 1e-18}};
  CHECK_THROWS_AS(
      CurvedPatch::make_param_curve(retrace, 0, 2 * 3.14159265358979, 1.0, 0, 16),
      ValidationError);
}

TEST_CASE("sphere and cylinder patches sit in 3D") {
  auto sphere = CurvedPatch::make_sphere(Vec(0, 0, 0), 1.0, 3.14159265358979,
                                         1.0, 0, 16);
  Vec p = sphere.eval({1.5707963267948966, 0});
  CHECK(distance(p, Vec(1, 0, 0)) < 1e-12);
  CHECK(distance(sphere.normal({1.5707963267948966, 0}), Vec(1, 0, 0)) < 1e-12);

  auto cyl = CurvedPatch::make_cylinder(Vec(0, 0, 0), Vec(0, 0, 1), 2.0, 3.0,
                                        1.0, 1, 16);
  auto [d, t] = cyl.nearest(Vec(3, 0, 1));
  CHECK(d == doctest::Approx(1.0));
  CHECK(cyl.jacobian_factor(t) == doctest::Approx(2.0));
}

TEST_CASE("element lookups by id") {
  auto wall = PlanarWall::make({Vec(0, 0), Vec(1, 0)}, Vec(0, 1), 0.5, 0);
  PointReflector pr{Vec(2, 0), Vec(1, 0), 0.25, 1};
  Boundary b({wall}, {}, {pr});
  CHECK(b.element_absorption(0) == 0.5);
  CHECK(b.element_absorption(1) == 0.25);
  CHECK(distance(b.element_vector_at(0, Vec(0.5, 0)), Vec(0, 1)) < 1e-12);
  CHECK_THROWS_AS(b.element_absorption(42), ValidationError);
}
