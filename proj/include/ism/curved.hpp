// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <functional>
#include <vector>

#include "ism/paths.hpp"

namespace ism {

/// How a lattice sample's quadrature weight is derived from its
/// nearest-neighbor distance eps:
///   spacing:     eps^p          (reproduces the uniform 1/M weighting on a
///                                unit segment exactly)
///   ball_volume: V_p(eps)       (volume of the p-ball of radius eps:
///                                2*eps for p=1, pi*eps^2 for p=2)
/// The two differ by a constant factor; `spacing` is the default.
enum class WeightConvention { spacing, ball_volume };

struct LatticeSample {
  std::array<double, 2> param{0, 0};
  Vec point;
  Vec vector;
  double weight = 0;
  double eps = 0;
};

/// A patch sampled on the parameter lattice of spacing 1/M with
/// per-sample quadrature weights.  Total weight approximates the patch's
/// p-dimensional measure (length or area).
struct LatticeSampling {
  int patch_id = -1;
  double spacing = 0;
  int stratum_dim = 1;
  std::vector<LatticeSample> samples;

  double total_weight() const {
    double s = 0;
    for (const auto& a : samples) s += a.weight;
    return s;
  }
};

/// Evaluates the patch map on the interior lattice and assigns each sample
/// its nearest-neighbor-based weight.  Throws InjectivityViolationError when
/// two samples map within 1e-9.
LatticeSampling sample_patch(const CurvedPatch& patch, int M,
                             WeightConvention convention = WeightConvention::spacing);

/// Independent quadrature reference: sum of g(map(x)) * sqrt(det(J^T J)) *
/// (1/M)^p over the same lattice — a Riemann sum using the analytic
/// Jacobian rather than nearest-neighbor distances.
double riemann_reference(const CurvedPatch& patch,
                         const std::function<double(const Vec&)>& g, int M);

/// One quantum of the virtual-source measure: a position with a weight, the
/// dimension of the stratum it samples, and the reflection path explaining
/// it.  Discrete images carry weight exactly 1 and stratum 0.
struct WeightedAtom {
  Vec position;
  double weight = 1.0;
  int stratum_dim = 0;
  ReflectionPath path;
  int order = 0;
  double absorption = 1.0;   // product of per-bounce retained amplitudes
  double directivity = 1.0;  // source and receiver gains along the path
  double validity_residual = 0.0;
  bool grazing = false;
};

/// Discovers valid and visible reflection paths whose bounces involve curved
/// patches or point reflectors, using lattice samples as candidates.
///
/// Order 1: every patch sample (and every point reflector) is a candidate;
/// a candidate is accepted when its law-of-reflection residual is at most
/// angular_tol (or, when angular_tol <= 0, a lattice-scaled default of
/// 2*eps/min_segment).  Accepted single-bounce candidates are refined by
/// local path-length minimization inside their lattice cell.  When a whole
/// accepted cluster refines to one point at lattice resolution, it is merged
/// into a single discrete image (stratum 0, weight 1); otherwise the atoms
/// keep their sample weights and the patch's stratum dimension.
///
/// Order 2: exhaustive candidate pairs over patch samples and point
/// reflectors (cost capped), plus mixed sequences with one wall bounce
/// solved exactly by mirroring.  Orders beyond 2 on curved elements are
/// refused (ConfigError).
///
/// `M` overrides every patch's lattice density when positive; otherwise each
/// patch uses its own configured density.
std::vector<WeightedAtom> find_curved_paths(
    const Boundary& boundary, const Vec& s, const Vec& r, int max_order, int M,
    double angular_tol = 0.0,
    WeightConvention convention = WeightConvention::spacing, int threads = 1);

/// Largest curved order (1 or 2) whose candidate count fits the order-2
/// pair budget at the given density (0 = per-patch densities).  Lets callers
/// degrade gracefully instead of tripping the budget error.
int max_affordable_curved_order(const Boundary& boundary, int M = 0);

}  // namespace ism
