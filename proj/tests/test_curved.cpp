// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ism/curved.hpp"
#include "ism/planar.hpp"

using namespace ism;

namespace {

constexpr double kPi = std::numbers::pi;

// Unit segment (0,1) on the x-axis, parametrized at unit speed.
CurvedPatch unit_segment(int M = 64) {
  ParamTables t;
  t.poly = {{0.0, 1.0}, {0.0}};
  return CurvedPatch::make_param_curve(t, 0.0, 1.0, 1.0, 0, M);
}

// Quarter circle of radius R on a unit parameter domain:
//   u -> (R cos(pi u / 2), R sin(pi u / 2)),  u in (0, 1)
CurvedPatch quarter_circle_unit_domain(double R, int M = 64) {
  ParamTables t;
  t.cos_coef = {{0.0, R}, {0.0}};
  t.sin_coef = {{0.0}, {0.0, R}};
  t.omega = kPi / 2;
  return CurvedPatch::make_param_curve(t, 0.0, 1.0, 1.0, 0, M);
}

// The flat wall x = 0, y in (0,1), declared as a curve.
CurvedPatch flat_patch(int M) {
  ParamTables t;
  t.poly = {{0.0}, {0.0, 1.0}};
  return CurvedPatch::make_param_curve(t, 0.0, 1.0, 1.0, 0, M);
}

double lsq_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}

}  // namespace

TEST_CASE("unit segment sampling reproduces the uniform weighting") {
  auto seg = unit_segment();
  auto spacing = sample_patch(seg, 10, WeightConvention::spacing);
  REQUIRE(spacing.samples.size() == 9);
  for (const auto& s : spacing.samples)
    CHECK(s.weight == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(spacing.total_weight() == doctest::Approx(0.9).epsilon(1e-12));

  auto ball = sample_patch(seg, 10, WeightConvention::ball_volume);
  CHECK(ball.total_weight() == doctest::Approx(1.8).epsilon(1e-12));
}

TEST_CASE("quarter-circle sampling approaches the arc length") {
  auto arc = CurvedPatch::make_circle(Vec(0, 0), 2.0, 0.0, kPi / 2, 1.0, 0, 64);
  auto sampling = sample_patch(arc, 1000, WeightConvention::spacing);
  CHECK(sampling.total_weight() == doctest::Approx(kPi).epsilon(0.01));
}

TEST_CASE("empty parameter domains produce empty samplings") {
  ParamTables t;
  t.poly = {{0.0, 1.0}, {0.0}};
  auto tiny = CurvedPatch::make_param_curve(t, 0.4, 0.45, 1.0, 0, 8);
  // spacing 1/8 has no lattice point strictly inside (0.4, 0.45)
  auto sampling = sample_patch(tiny, 8);
  CHECK(sampling.samples.empty());
  CHECK(sampling.total_weight() == 0.0);
}

TEST_CASE("riemann_reference matches closed forms") {
  auto seg = unit_segment();
  for (int M : {10, 100, 1000}) {
    double one = riemann_reference(seg, [](const Vec&) { return 1.0; }, M);
    CHECK(one == doctest::Approx((M - 1.0) / M).epsilon(1e-12));
    double x = riemann_reference(seg, [](const Vec& p) { return p.x(); }, M);
    CHECK(x == doctest::Approx((M - 1.0) / (2.0 * M)).epsilon(1e-12));
  }

  auto circle = CurvedPatch::make_circle(Vec(0, 0), 1.5, 0.0, 2 * kPi, 1.0, 0, 64);
  double len = riemann_reference(circle, [](const Vec&) { return 1.0; }, 2000);
  CHECK(len == doctest::Approx(2 * kPi * 1.5).epsilon(1e-3));
}

TEST_CASE("lattice quadrature converges at first order in 1/M") {
  auto seg = unit_segment();
  auto arc = quarter_circle_unit_domain(2.0);
  const double arc_len = kPi;  // quarter turn of radius 2

  struct Case {
    const CurvedPatch* patch;
    std::function<double(const Vec&)> g;
    double exact;
    double c_bound;  // fitted constant of the C/M envelope
  };
  std::vector<Case> cases = {
      {&seg, [](const Vec&) { return 1.0; }, 1.0, 2.0},
      {&seg, [](const Vec& p) { return p.x(); }, 0.5, 2.0},
      {&seg, [](const Vec& p) { return p.x() * p.x(); }, 1.0 / 3.0, 2.0},
      {&arc, [](const Vec&) { return 1.0; }, arc_len, 4.0},
  };

  for (const auto& c : cases) {
    std::vector<double> log_m, log_err;
    for (int M : {100, 1000, 10000}) {
      auto sampling = sample_patch(*c.patch, M, WeightConvention::spacing);
      double integral = 0;
      for (const auto& s : sampling.samples) integral += c.g(s.point) * s.weight;
      double err = std::abs(integral - c.exact);
      CHECK(err <= c.c_bound / M);
      // the nearest-neighbor route stays within O(1/M) of the Jacobian route
      double ref = riemann_reference(*c.patch, c.g, M);
      CHECK(std::abs(integral - ref) <= c.c_bound / M);
      log_m.push_back(std::log10(static_cast<double>(M)));
      log_err.push_back(std::log10(std::max(err, 1e-300)));
    }
    double slope = lsq_slope(log_m, log_err);
    CHECK(slope == doctest::Approx(-1.0).epsilon(0.2));
  }
}

TEST_CASE("sampling and quadrature validate the lattice density") {
  auto seg = unit_segment();
  CHECK_THROWS_AS(sample_patch(seg, 1), ConfigError);
  CHECK_THROWS_AS(riemann_reference(seg, [](const Vec&) { return 1.0; }, 0),
                  ConfigError);
}

TEST_CASE("sampling rejects maps that fold onto themselves") {
  // two passes over the same segment
  ParamTables t;
  t.cos_coef = {{0.0, 1.0}, {0.0}};
  t.poly = {{}, {0.0, 1e-12}};
  CHECK_THROWS_AS(CurvedPatch::make_param_curve(t, 0.0, 2 * kPi, 1.0, 0, 64),
                  ValidationError);
}

TEST_CASE("circular room: first-order atoms form a continuum with chord extremes") {
  auto circle = CurvedPatch::make_circle(Vec(0, 0), 2.0, 0.0, 2 * kPi, 1.0, 0, 1000);
  Boundary b({}, {circle}, {});
  Vec s(0.5, 0), r(0, 0);

  auto atoms = find_curved_paths(b, s, r, 1, 0);
  REQUIRE(atoms.size() >= 10);

  double min_len = 1e9, max_len = 0;
  for (const auto& a : atoms) {
    CHECK(a.stratum_dim == 1);
    CHECK(a.order == 1);
    CHECK(a.weight > 0);
    // virtual-source position explains the travel distance exactly
    CHECK(std::abs(distance(a.position, r) - path_length(a.path)) < 1e-9);
    CHECK(check_validity(a.path, b).residual <= 3e-3);  // lattice-scaled at M = 1000
    auto vis = check_visibility(a.path, b);
    CHECK(vis.visible);
    double len = path_length(a.path);
    min_len = std::min(min_len, len);
    max_len = std::max(max_len, len);
  }
  // chords through the center: 2R - d and 2R + d with d = 0.5
  CHECK(min_len == doctest::Approx(3.5).epsilon(0.01));
  CHECK(max_len == doctest::Approx(4.5).epsilon(0.01));
}

TEST_CASE("a flat patch collapses to the single planar image") {
  auto patch = flat_patch(1000);
  Boundary b({}, {patch}, {});
  Vec s(0.3, 0.3), r(0.6, 0.4);

  auto atoms = find_curved_paths(b, s, r, 1, 0);
  REQUIRE(atoms.size() == 1);
  CHECK(atoms[0].stratum_dim == 0);
  CHECK(atoms[0].weight == 1.0);
  CHECK(distance(atoms[0].position, Vec(-0.3, 0.3)) < 1e-6);
  CHECK(atoms[0].path.bounces.size() == 1);
  CHECK(distance(atoms[0].path.bounces[0].point, Vec(0, 1.0 / 3.0)) < 1e-6);
}

TEST_CASE("a parabolic mirror with the source at its focus reflects nothing back") {
  // y = x^2 / 4 has focus (0, 1); all reflected rays leave parallel, upward
  ParamTables t;
  t.poly = {{0.0, 1.0}, {0.0, 0.0, 0.25}};
  auto parabola = CurvedPatch::make_param_curve(t, -1.0, 1.0, 1.0, 0, 500);
  Boundary b({}, {parabola}, {});
  Vec focus(0, 1), below(0.3, 0.01);  // under the mirror surface at x = 0.3

  auto atoms = find_curved_paths(b, focus, below, 1, 0);
  CHECK(atoms.empty());
}

TEST_CASE("point reflectors act as discrete boundary atoms") {
  // aligned so the law of reflection holds exactly at the point
  PointReflector p{Vec(0, 0), Vec(0, 1), 1.0, 0};
  Boundary aligned({}, {}, {p});
  auto atoms = find_curved_paths(aligned, Vec(-1, 1), Vec(1, 1), 1, 0);
  REQUIRE(atoms.size() == 1);
  CHECK(atoms[0].stratum_dim == 0);
  CHECK(atoms[0].weight == 1.0);
  CHECK(distance(atoms[0].position, Vec(-1, -1)) < 1e-12);

  // misaligned sink: no exact reflection, no atom
  auto none = find_curved_paths(aligned, Vec(-1, 1), Vec(2, 1), 1, 0);
  CHECK(none.empty());
}

TEST_CASE("mixed wall and patch two-bounce paths are found") {
  auto wall = PlanarWall::make({Vec(0, -5), Vec(0, 5)}, Vec(1, 0), 1.0, 0);
  ParamTables t;
  t.poly = {{0.0, 1.0}, {0.0}};  // the floor y = 0 as a curve
  auto floor = CurvedPatch::make_param_curve(t, -5.0, 5.0, 1.0, 1, 256);
  Boundary b({wall}, {floor}, {});
  Vec s(1, 2), r(2, 1);

  auto atoms = find_curved_paths(b, s, r, 2, 0);
  // the corner double bounce: wall at (0,1), floor at (1,0), image (-1,-2)
  bool found = false;
  for (const auto& a : atoms) {
    if (a.order != 2) continue;
    if (a.path.bounces[0].element_id == 0 && a.path.bounces[1].element_id == 1 &&
        distance(a.position, Vec(-1, -2)) < 0.05)
      found = true;
    CHECK(check_validity(a.path, b).residual < 0.1);
  }
  CHECK(found);
}

TEST_CASE("two-bounce paths inside a circle exist and verify") {
  auto circle = CurvedPatch::make_circle(Vec(0, 0), 2.0, 0.0, 2 * kPi, 1.0, 0, 64);
  Boundary b({}, {circle}, {});
  auto atoms = find_curved_paths(b, Vec(0.5, 0), Vec(-0.3, 0.2), 2, 256);
  int order2 = 0;
  for (const auto& a : atoms)
    if (a.order == 2) {
      ++order2;
      CHECK(std::abs(distance(a.position, Vec(-0.3, 0.2)) -
                     path_length(a.path)) < 1e-9);
    }
  CHECK(order2 > 0);
}

TEST_CASE("spherical room continuum in 3D mirrors the circle behavior") {
  auto sphere = CurvedPatch::make_sphere(Vec(0, 0, 0), 2.0, kPi, 1.0, 0, 64);
  Boundary b({}, {sphere}, {});
  Vec s(0.5, 0, 0), r(0, 0, 0);

  auto atoms = find_curved_paths(b, s, r, 1, 0);
  REQUIRE(!atoms.empty());
  double min_len = 1e9, max_len = 0;
  for (const auto& a : atoms) {
    CHECK(a.stratum_dim == 2);
    CHECK(std::abs(distance(a.position, r) - path_length(a.path)) < 1e-9);
    double len = path_length(a.path);
    min_len = std::min(min_len, len);
    max_len = std::max(max_len, len);
  }
  CHECK(min_len == doctest::Approx(3.5).epsilon(0.02));
  CHECK(max_len == doctest::Approx(4.5).epsilon(0.02));
}

TEST_CASE("the affordable curved order shrinks with dense samplings") {
  auto coarse = CurvedPatch::make_circle(Vec(0, 0), 2.0, 0.0, 2 * kPi, 1.0, 0, 64);
  CHECK(max_affordable_curved_order(Boundary({}, {coarse}, {})) == 2);
  auto dense = CurvedPatch::make_circle(Vec(0, 0), 2.0, 0.0, 2 * kPi, 1.0, 0, 4000);
  CHECK(max_affordable_curved_order(Boundary({}, {dense}, {})) == 1);
}

TEST_CASE("curved orders beyond two are refused") {
  auto circle = CurvedPatch::make_circle(Vec(0, 0), 2.0, 0.0, 2 * kPi, 1.0, 0, 64);
  Boundary b({}, {circle}, {});
  CHECK_THROWS_AS(find_curved_paths(b, Vec(0.5, 0), Vec(0, 0), 3, 0), ConfigError);
}
