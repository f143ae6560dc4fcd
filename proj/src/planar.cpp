// SPDX-License-Identifier: Apache-2.0
#include "ism/planar.hpp"

#include <algorithm>
#include <cmath>

#include "ism/parallel.hpp"

namespace ism {

namespace {

Vec mirror_across_wall(const Vec& u, const PlanarWall& w) {
  // Hyperplane form: independent of the representative point on the wall.
  return u - w.normal() * (2.0 * (w.normal().dot(u) - w.offset()));
}

const PlanarWall& wall_or_throw(const Boundary& boundary, int id) {
  const PlanarWall* w = boundary.wall_by_id(id);
  if (!w) throw ValidationError("wall sequence references unknown wall id " +
                                std::to_string(id));
  return *w;
}

Line line_through(const Vec& a, const Vec& b, double tol) {
  if (distance(a, b) <= tol)
    throw DegenerateLineError("line through coincident points " + a.str());
  return {a, (b - a).normalized()};
}

double point_line_distance(const Vec& p, const Line& l) {
  Vec d = p - l.anchor;
  return (d - l.direction * d.dot(l.direction)).norm();
}

}  // namespace

Vec image_of_source_through_walls(const Vec& s, const WallSequence& seq,
                                  const Boundary& boundary) {
  Vec u = s;
  for (int id : seq) u = mirror_across_wall(u, wall_or_throw(boundary, id));
  return u;
}

std::vector<Line> build_lines(const Vec& s, const Vec& r, const WallSequence& seq,
                              const Boundary& boundary, double tol) {
  const std::size_t k = seq.size();
  std::vector<Vec> fwd(k + 1), bwd(k + 2);
  fwd[0] = s;
  for (std::size_t j = 1; j <= k; ++j)
    fwd[j] = mirror_across_wall(fwd[j - 1], wall_or_throw(boundary, seq[j - 1]));
  bwd[k + 1] = r;
  for (std::size_t j = k; j >= 1; --j)
    bwd[j] = mirror_across_wall(bwd[j + 1], wall_or_throw(boundary, seq[j - 1]));

  std::vector<Line> lines;
  lines.reserve(k + 1);
  lines.push_back(line_through(fwd[k], r, tol));
  for (std::size_t i = 1; i + 1 <= k; ++i)
    lines.push_back(line_through(fwd[k - i], bwd[k - i + 1], tol));
  lines.push_back(line_through(s, bwd[1], tol));
  return lines;
}

std::optional<ReflectionPath> psi(const WallSequence& seq, const Vec& s,
                                  const Vec& r, const Boundary& boundary,
                                  double tol) {
  const std::size_t k = seq.size();
  for (std::size_t j = 0; j + 1 < k; ++j)
    if (seq[j] == seq[j + 1]) return std::nullopt;

  std::vector<Line> lines;
  try {
    lines = build_lines(s, r, seq, boundary, tol);
  } catch (const DegenerateLineError&) {
    return std::nullopt;
  }

  ReflectionPath path;
  path.source = s;
  path.sink = r;
  for (std::size_t j = 1; j <= k; ++j) {
    const PlanarWall& wall = wall_or_throw(boundary, seq[j - 1]);
    const Line& incoming = lines[k - j + 1];  // contains segment j-1
    const Line& outgoing = lines[k - j];      // contains segment j

    double along = wall.normal().dot(incoming.direction);
    if (std::abs(along) <= 1e-14) return std::nullopt;  // parallel: empty or infinite
    double t = (wall.offset() - wall.normal().dot(incoming.anchor)) / along;
    Vec y = incoming.anchor + incoming.direction * t;

    // The candidate must also sit on the outgoing line, and must be the
    // single point of the intersection (coincident lines are rejected).
    if (point_line_distance(y, outgoing) > tol) return std::nullopt;
    if (std::abs(std::abs(incoming.direction.dot(outgoing.direction)) - 1.0) <=
        1e-14)
      return std::nullopt;

    if (!wall.interior_contains(y, tol)) return std::nullopt;
    if (boundary.on_seam(y, tol, wall.id())) return std::nullopt;
    path.bounces.push_back({y, wall.id()});
  }

  // Consecutive points must be distinct and the assembled path must obey the
  // law of reflection (a line can contain a segment pointing the wrong way).
  try {
    auto v = check_validity(path, boundary, tol);
    if (v.residual > 1e-10) return std::nullopt;
  } catch (const DegenerateSegmentError&) {
    return std::nullopt;
  }
  return path;
}

namespace {

bool same_point_sequence(const ReflectionPath& a, const ReflectionPath& b,
                         double tol) {
  if (a.bounces.size() != b.bounces.size()) return false;
  for (std::size_t i = 0; i < a.bounces.size(); ++i)
    if (distance(a.bounces[i].point, b.bounces[i].point) > tol) return false;
  return true;
}

}  // namespace

std::vector<VirtualSource> enumerate_virtual_sources(const Boundary& boundary,
                                                     const Vec& s, const Vec& r,
                                                     int max_order, double tol,
                                                     int threads) {
  if (max_order < 0) throw ConfigError("max_order must be nonnegative");
  if (distance(s, r) <= tol)
    throw ConfigError("source and receiver coincide; enumeration undefined");

  std::vector<VirtualSource> out;

  {  // order 0: the direct source, when visible
    ReflectionPath direct{s, {}, r};
    auto vis = check_visibility(direct, boundary, tol);
    if (vis.visible) {
      VirtualSource v;
      v.position = s;
      v.order = 0;
      v.path = direct;
      v.grazing = vis.grazing;
      out.push_back(std::move(v));
    }
  }

  std::vector<int> wall_ids;
  for (const auto& w : boundary.walls()) wall_ids.push_back(w.id());
  std::sort(wall_ids.begin(), wall_ids.end());
  const std::size_t n_walls = wall_ids.size();
  if (n_walls == 0 || max_order == 0) return out;

  std::vector<WallSequence> level;
  for (int id : wall_ids) level.push_back({id});

  for (int k = 1; k <= max_order; ++k) {
    auto results = parallel_map<std::optional<VirtualSource>>(
        level.size(), threads, [&](std::size_t i) -> std::optional<VirtualSource> {
          const WallSequence& seq = level[i];
          auto path = psi(seq, s, r, boundary, tol);
          if (!path) return std::nullopt;
          auto vis = check_visibility(*path, boundary, tol);
          if (!vis.visible) return std::nullopt;
          VirtualSource v;
          v.position = compose_projections(
              s, [&] {
                std::vector<std::pair<Vec, Vec>> refl;
                for (const auto& b : path->bounces)
                  refl.emplace_back(b.point,
                                    boundary.element_vector_at(b.element_id, b.point));
                return refl;
              }());
          v.order = k;
          v.path = std::move(*path);
          v.walls = seq;
          v.validity_residual = check_validity(v.path, boundary, tol).residual;
          v.grazing = vis.grazing;
          return v;
        });

    for (auto& res : results) {
      if (!res) continue;
      // Identical point sequences under different wall labels describe one
      // physical arrival; keep the first.
      bool dup = false;
      for (const auto& kept : out)
        if (kept.order == res->order &&
            same_point_sequence(kept.path, res->path, tol)) {
          dup = true;
          break;
        }
      if (!dup) out.push_back(std::move(*res));
    }

    if (k == max_order) break;
    std::vector<WallSequence> next;
    next.reserve(level.size() * n_walls);
    for (const auto& seq : level)
      for (int id : wall_ids) {
        if (id == seq.back()) continue;  // immediate repeat is impossible
        WallSequence ext = seq;
        ext.push_back(id);
        next.push_back(std::move(ext));
      }
    level = std::move(next);
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const VirtualSource& a, const VirtualSource& b) {
                     if (a.order != b.order) return a.order < b.order;
                     return a.walls < b.walls;
                   });
  return out;
}

}  // namespace ism
