// SPDX-License-Identifier: Apache-2.0
#include "ism/curved.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "ism/parallel.hpp"

namespace ism {

namespace {

constexpr double kPi = std::numbers::pi;

double ball_volume(int p, double eps) {
  return p == 1 ? 2.0 * eps : kPi * eps * eps;
}

double sample_weight(int p, double eps, WeightConvention convention) {
  return convention == WeightConvention::spacing ? std::pow(eps, p)
                                                 : ball_volume(p, eps);
}

}  // namespace

LatticeSampling sample_patch(const CurvedPatch& patch, int M,
                             WeightConvention convention) {
  if (M < 2) throw ConfigError("sample_patch requires M >= 2");
  LatticeSampling out;
  out.patch_id = patch.id();
  out.spacing = 1.0 / M;
  out.stratum_dim = patch.param_dim();
  for (const auto& s : patch.lattice_samples(M))
    out.samples.push_back({s.param, s.point, s.vector,
                           sample_weight(patch.param_dim(), s.eps, convention),
                           s.eps});
  return out;
}

double riemann_reference(const CurvedPatch& patch,
                         const std::function<double(const Vec&)>& g, int M) {
  if (M < 2) throw ConfigError("riemann_reference requires M >= 2");
  const double cell = std::pow(1.0 / M, patch.param_dim());
  double sum = 0;
  for (const auto& t : patch.lattice_params(M))
    sum += g(patch.eval(t)) * patch.jacobian_factor(t) * cell;
  return sum;
}

// ---------------------------------------------------------------------------
// Curved path discovery
// ---------------------------------------------------------------------------

namespace {

struct Candidate {
  std::array<double, 2> param{0, 0};
  Vec point;        // refined reflection point
  Vec vector;       // field vector at the refined point
  double weight = 1.0;
  double eps = 0.0;
  double residual = 0.0;
  bool grazing = false;
};

double direction_mismatch(const Vec& from, const Vec& at, const Vec& to,
                          const Vec& n) {
  Vec mirrored = symmetric_project(from, at, n);
  Vec ref = at - mirrored;
  return ((to - at).normalized() - ref.normalized()).norm();
}

double bounce_residual(const Vec& s, const Vec& q, const Vec& r, const Vec& n) {
  return direction_mismatch(s, q, r, n);
}

// Path length s -> patch(t) -> r.
double detour_length(const CurvedPatch& patch, const Vec& s, const Vec& r,
                     double t0, double t1) {
  Vec q = patch.eval({t0, t1});
  return distance(s, q) + distance(q, r);
}

double golden_minimize(double a, double b, const std::function<double(double)>& f) {
  const double gr = (std::sqrt(5.0) - 1) / 2;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 120 && (b - a) > 1e-13; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Fermat refinement: minimize path length within one lattice cell around the
// sample.  Valid as a stand-in for the reflection law because the built-in
// field vectors are the patch normals.
std::array<double, 2> refine_in_cell(const CurvedPatch& patch, const Vec& s,
                                     const Vec& r,
                                     const std::array<double, 2>& t, double h) {
  auto lo = patch.domain_lo();
  auto hi = patch.domain_hi();
  std::array<double, 2> cur = t;
  const double margin = 1e-12;
  if (patch.param_dim() == 1) {
    double a = std::max(lo[0] + margin, t[0] - h);
    double b = std::min(hi[0] - margin, t[0] + h);
    cur[0] = golden_minimize(
        a, b, [&](double x) { return detour_length(patch, s, r, x, 0); });
    return cur;
  }
  for (int round = 0; round < 3; ++round) {
    double a0 = std::max(lo[0] + margin, t[0] - h);
    double b0 = std::min(hi[0] - margin, t[0] + h);
    cur[0] = golden_minimize(a0, b0, [&](double x) {
      return detour_length(patch, s, r, x, cur[1]);
    });
    double a1 = std::max(lo[1] + margin, t[1] - h);
    double b1 = std::min(hi[1] - margin, t[1] + h);
    cur[1] = golden_minimize(a1, b1, [&](double x) {
      return detour_length(patch, s, r, cur[0], x);
    });
  }
  return cur;
}

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Group accepted candidates into lattice-adjacent clusters.
std::vector<std::vector<std::size_t>> cluster_by_param(
    const std::vector<Candidate>& cands, int param_dim, double h) {
  DisjointSet dsu(cands.size());
  if (param_dim == 1) {
    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return cands[a].param[0] < cands[b].param[0];
    });
    for (std::size_t i = 0; i + 1 < order.size(); ++i)
      if (cands[order[i + 1]].param[0] - cands[order[i]].param[0] <= 1.501 * h)
        dsu.unite(order[i], order[i + 1]);
  } else {
    std::map<std::pair<long, long>, std::size_t> grid;
    for (std::size_t i = 0; i < cands.size(); ++i)
      grid[{std::lround(cands[i].param[0] / h),
            std::lround(cands[i].param[1] / h)}] = i;
    for (const auto& [key, i] : grid)
      for (long da = -1; da <= 1; ++da)
        for (long db = -1; db <= 1; ++db) {
          auto it = grid.find({key.first + da, key.second + db});
          if (it != grid.end()) dsu.unite(i, it->second);
        }
  }
  std::map<std::size_t, std::vector<std::size_t>> comps;
  for (std::size_t i = 0; i < cands.size(); ++i)
    comps[dsu.find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : comps) out.push_back(std::move(members));
  return out;
}

}  // namespace

namespace {

constexpr double kPairBudget = 4e7;

double approx_sample_count(const CurvedPatch& p, int M) {
  int density = M > 0 ? M : p.lattice_M();
  double n = (p.domain_hi()[0] - p.domain_lo()[0]) * density;
  if (p.param_dim() == 2)
    n *= (p.domain_hi()[1] - p.domain_lo()[1]) * density;
  return std::max(n, 1.0);
}

}  // namespace

int max_affordable_curved_order(const Boundary& boundary, int M) {
  double worst = 0;
  for (const auto& a : boundary.patches())
    for (const auto& b : boundary.patches())
      worst = std::max(worst,
                       approx_sample_count(a, M) * approx_sample_count(b, M));
  return worst > kPairBudget ? 1 : 2;
}

std::vector<WeightedAtom> find_curved_paths(const Boundary& boundary, const Vec& s,
                                            const Vec& r, int max_order, int M,
                                            double angular_tol,
                                            WeightConvention convention,
                                            int threads) {
  if (max_order > 2)
    throw ConfigError(
        "curved reflections beyond order 2 are not supported; lower the "
        "curved order or model the element with walls");
  std::vector<WeightedAtom> atoms;
  if (max_order < 1) return atoms;
  if (boundary.patches().empty() && boundary.points().empty()) return atoms;

  const double tol = kGeomTol;

  // Acceptance threshold for the direction-mismatch residual: the error a
  // true specular point can incur when snapped to the lattice.  Capped:
  // segments short enough to need a larger allowance are below the sampling
  // resolution and cannot be certified at all.
  auto accept_tol = [&](double eps_sum, double min_seg) {
    if (angular_tol > 0) return angular_tol;
    return std::min(2.0 * eps_sum / std::max(min_seg, tol), 0.1);
  };

  struct SampledPatch {
    const CurvedPatch* patch;
    LatticeSampling sampling;
  };
  std::vector<SampledPatch> sampled;
  for (const auto& p : boundary.patches()) {
    int density = M > 0 ? M : p.lattice_M();
    sampled.push_back({&p, sample_patch(p, density, convention)});
  }

  auto push_atom = [&](WeightedAtom a) {
    auto vis = check_visibility(a.path, boundary, tol);
    if (!vis.visible) return;
    a.grazing = vis.grazing;
    std::vector<std::pair<Vec, Vec>> refl;
    for (const auto& b : a.path.bounces)
      refl.emplace_back(b.point,
                        boundary.element_vector_at(b.element_id, b.point));
    Vec composed = compose_projections(s, refl);
    // The virtual source must sit at exactly the traveled distance from the
    // receiver; the composition fixes the direction, the path the radius.
    // For an exactly valid path the correction is at floating-point noise.
    Vec dir = (composed - r).normalized();
    a.position = dir.norm() > 0.5 ? r + dir * path_length(a.path) : composed;
    atoms.push_back(std::move(a));
  };

  // ---- order 1: patches ----
  for (const auto& sp : sampled) {
    const CurvedPatch& patch = *sp.patch;
    const auto& samples = sp.sampling.samples;
    const double h = sp.sampling.spacing;

    auto flags = parallel_map<char>(samples.size(), threads, [&](std::size_t i) {
      const auto& q = samples[i];
      double seg1 = distance(s, q.point), seg2 = distance(q.point, r);
      if (seg1 <= tol || seg2 <= tol) return char(0);
      double resid = bounce_residual(s, q.point, r, q.vector);
      return char(resid <= accept_tol(q.eps, std::min(seg1, seg2)) ? 1 : 0);
    });

    std::vector<Candidate> accepted;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (!flags[i]) continue;
      const auto& q = samples[i];
      Candidate c;
      c.param = q.param;
      c.weight = q.weight;
      c.eps = q.eps;

      auto refined = refine_in_cell(patch, s, r, q.param, h);
      Vec rp = patch.eval(refined);
      Vec rn = patch.normal(refined);
      double resid_orig = bounce_residual(s, q.point, r, q.vector);
      double resid_ref =
          (distance(s, rp) > tol && distance(rp, r) > tol)
              ? bounce_residual(s, rp, r, rn)
              : resid_orig + 1;
      if (resid_ref <= resid_orig) {
        c.point = rp;
        c.vector = rn;
        c.residual = resid_ref;
      } else {
        c.point = q.point;
        c.vector = q.vector;
        c.residual = resid_orig;
      }

      ReflectionPath path{s, {{c.point, patch.id()}}, r};
      auto vis = check_visibility(path, boundary, tol);
      if (!vis.visible) continue;
      c.grazing = vis.grazing;
      accepted.push_back(std::move(c));
    }
    if (accepted.empty()) continue;

    auto clusters = cluster_by_param(accepted, patch.param_dim(), h);
    std::vector<WeightedAtom> collapsed;
    for (const auto& members : clusters) {
      double spread = 0, max_eps = 0;
      for (std::size_t a = 0; a < members.size(); ++a) {
        max_eps = std::max(max_eps, accepted[members[a]].eps);
        for (std::size_t b = a + 1; b < members.size(); ++b)
          spread = std::max(spread, distance(accepted[members[a]].point,
                                             accepted[members[b]].point));
      }
      bool point_like = spread <= 2.5 * max_eps;
      if (point_like) {
        // A whole cluster refining onto one point is a discrete image, not a
        // continuum: one atom of weight 1.
        const Candidate* best = &accepted[members[0]];
        for (std::size_t idx : members)
          if (accepted[idx].residual < best->residual) best = &accepted[idx];
        WeightedAtom a;
        a.weight = 1.0;
        a.stratum_dim = 0;
        a.order = 1;
        a.path = {s, {{best->point, patch.id()}}, r};
        a.validity_residual = best->residual;
        // Merge with an identical collapse from an adjacent cluster (a
        // point-like set can straddle a parameter seam, e.g. a closed arc).
        bool merged = false;
        for (const auto& prev : collapsed)
          if (distance(prev.path.bounces[0].point, best->point) <= 2.5 * max_eps)
            merged = true;
        if (!merged) {
          collapsed.push_back(a);
          push_atom(a);
        }
        continue;
      }
      for (std::size_t idx : members) {
        const Candidate& c = accepted[idx];
        WeightedAtom a;
        a.weight = c.weight;
        a.stratum_dim = patch.param_dim();
        a.order = 1;
        a.path = {s, {{c.point, patch.id()}}, r};
        a.validity_residual = c.residual;
        push_atom(a);
      }
    }
  }

  // ---- order 1: point reflectors ----
  for (const auto& p : boundary.points()) {
    double seg1 = distance(s, p.position), seg2 = distance(p.position, r);
    if (seg1 <= tol || seg2 <= tol) continue;
    double resid = bounce_residual(s, p.position, r, p.vector);
    double thr = angular_tol > 0 ? angular_tol : tol;
    if (resid > thr) continue;
    WeightedAtom a;
    a.weight = 1.0;
    a.stratum_dim = 0;
    a.order = 1;
    a.path = {s, {{p.position, p.id}}, r};
    a.validity_residual = resid;
    push_atom(a);
  }

  if (max_order < 2) return atoms;

  // ---- order 2 ----
  struct Element {
    int id;
    int stratum;  // p for patches, 0 for point reflectors
    std::vector<LatticeSample> samples;
  };
  std::vector<Element> elements;
  for (const auto& sp : sampled)
    elements.push_back(
        {sp.patch->id(), sp.patch->param_dim(), sp.sampling.samples});
  for (const auto& p : boundary.points())
    elements.push_back({p.id, 0, {{{0, 0}, p.position, p.vector, 1.0, 0.0}}});

  auto try_pair = [&](const Element& e1, const LatticeSample& q1,
                      const Element& e2, const LatticeSample& q2) {
    double seg1 = distance(s, q1.point);
    double seg2 = distance(q1.point, q2.point);
    double seg3 = distance(q2.point, r);
    if (seg1 <= tol || seg2 <= tol || seg3 <= tol) return;
    double min_seg = std::min({seg1, seg2, seg3});
    double resid = std::max(bounce_residual(s, q1.point, q2.point, q1.vector),
                            bounce_residual(q1.point, q2.point, r, q2.vector));
    if (resid > accept_tol(q1.eps + q2.eps, min_seg)) return;
    WeightedAtom a;
    a.weight = q1.weight * q2.weight;
    a.stratum_dim = std::min(e1.stratum + e2.stratum, s.dim());
    a.order = 2;
    a.path = {s, {{q1.point, e1.id}, {q2.point, e2.id}}, r};
    a.validity_residual = resid;
    push_atom(a);
  };

  for (const auto& e1 : elements)
    for (const auto& e2 : elements) {
      if (e1.id == e2.id && e1.samples.size() == 1) continue;
      if (static_cast<double>(e1.samples.size()) * e2.samples.size() >
          kPairBudget)
        throw ConfigError(
            "order-2 curved candidate set too large; lower the lattice "
            "density or set curved_max_order to 1");
      for (const auto& q1 : e1.samples)
        for (const auto& q2 : e2.samples) {
          if (e1.id == e2.id && distance(q1.point, q2.point) <= tol) continue;
          try_pair(e1, q1, e2, q2);
        }
    }

  // ---- order 2, one wall bounce solved exactly by mirroring ----
  for (const auto& wall : boundary.walls()) {
    auto mirror = [&](const Vec& u) {
      return u - wall.normal() * (2.0 * (wall.normal().dot(u) - wall.offset()));
    };
    for (const auto& e : elements) {
      for (const auto& q : e.samples) {
        {  // wall first: s -> y(wall) -> q -> r
          Vec sm = mirror(s);
          Vec d = q.point - sm;
          double along = wall.normal().dot(d);
          if (std::abs(along) > 1e-14) {
            double lam = (wall.offset() - wall.normal().dot(sm)) / along;
            if (lam > 1e-9 && lam < 1 - 1e-9) {
              Vec y = sm + d * lam;
              if (wall.interior_contains(y, tol) &&
                  !boundary.on_seam(y, tol, wall.id())) {
                double seg2 = distance(y, q.point), seg3 = distance(q.point, r);
                double seg1 = distance(s, y);
                if (seg1 > tol && seg2 > tol && seg3 > tol) {
                  double resid =
                      bounce_residual(y, q.point, r, q.vector);
                  if (resid <=
                      accept_tol(q.eps, std::min({seg1, seg2, seg3}))) {
                    WeightedAtom a;
                    a.weight = q.weight;
                    a.stratum_dim = e.stratum;
                    a.order = 2;
                    a.path = {s, {{y, wall.id()}, {q.point, e.id}}, r};
                    a.validity_residual = resid;
                    push_atom(a);
                  }
                }
              }
            }
          }
        }
        {  // wall last: s -> q -> y(wall) -> r
          Vec rm = mirror(r);
          Vec d = rm - q.point;
          double along = wall.normal().dot(d);
          if (std::abs(along) > 1e-14) {
            double lam = (wall.offset() - wall.normal().dot(q.point)) / along;
            if (lam > 1e-9 && lam < 1 - 1e-9) {
              Vec y = q.point + d * lam;
              if (wall.interior_contains(y, tol) &&
                  !boundary.on_seam(y, tol, wall.id())) {
                double seg1 = distance(s, q.point), seg2 = distance(q.point, y);
                double seg3 = distance(y, r);
                if (seg1 > tol && seg2 > tol && seg3 > tol) {
                  double resid = bounce_residual(s, q.point, y, q.vector);
                  if (resid <=
                      accept_tol(q.eps, std::min({seg1, seg2, seg3}))) {
                    WeightedAtom a;
                    a.weight = q.weight;
                    a.stratum_dim = e.stratum;
                    a.order = 2;
                    a.path = {s, {{q.point, e.id}, {y, wall.id()}}, r};
                    a.validity_residual = resid;
                    push_atom(a);
                  }
                }
              }
            }
          }
        }
      }
    }
  }

  return atoms;
}

}  // namespace ism
