// SPDX-License-Identifier: Apache-2.0
#include "ism/rir.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ism {

namespace {
constexpr double kPi = std::numbers::pi;
}

DirectivityPattern DirectivityPattern::cardioid(const Vec& aim) {
  DirectivityPattern p;
  p.kind = Kind::cardioid;
  p.axis = aim.normalized();
  if (!(p.axis.norm() > 0.5))
    throw ValidationError("cardioid aim direction is zero");
  return p;
}

DirectivityPattern DirectivityPattern::tabulated(
    std::vector<std::pair<Vec, double>> entries) {
  if (entries.empty())
    throw ValidationError("tabulated directivity needs at least one entry");
  DirectivityPattern p;
  p.kind = Kind::tabulated;
  for (auto& [dir, gain] : entries) {
    if (!std::isfinite(gain))
      throw ValidationError("tabulated directivity gain is not finite");
    if (!is_unit(dir, 1e-9))
      throw ValidationError("tabulated directivity direction is not unit");
  }
  p.table = std::move(entries);
  return p;
}

double DirectivityPattern::eval(const Vec& dir) const {
  switch (kind) {
    case Kind::omni:
      return 1.0;
    case Kind::cardioid:
      return 0.5 * (1.0 + axis.dot(dir));
    case Kind::tabulated: {
      if (table.size() == 1) return table[0].second;
      // Linear interpolation between the two angularly nearest entries.
      double best1 = kPi * 2, best2 = kPi * 2;
      double g1 = 0, g2 = 0;
      for (const auto& [d, g] : table) {
        double ang = std::acos(std::clamp(d.dot(dir), -1.0, 1.0));
        if (ang < best1) {
          best2 = best1;
          g2 = g1;
          best1 = ang;
          g1 = g;
        } else if (ang < best2) {
          best2 = ang;
          g2 = g;
        }
      }
      if (best1 <= 1e-12) return g1;
      return (g1 * best2 + g2 * best1) / (best1 + best2);
    }
  }
  return 1.0;
}

double directivity_coeff(const WeightedAtom& atom, const DirectivityPattern& d_s,
                         const DirectivityPattern& d_r) {
  const ReflectionPath& p = atom.path;
  Vec first = p.bounces.empty() ? p.sink : p.bounces.front().point;
  Vec last = p.bounces.empty() ? p.source : p.bounces.back().point;
  return d_s.eval((first - p.source).normalized()) *
         d_r.eval((last - p.sink).normalized());
}

double absorption_coeff(const WeightedAtom& atom, const Boundary& boundary,
                        const AbsorptionHook* hook) {
  double a = 1.0;
  const auto& pts = atom.path;
  for (std::size_t j = 0; j < pts.bounces.size(); ++j) {
    const Bounce& b = pts.bounces[j];
    double base = boundary.element_absorption(b.element_id);
    if (hook && *hook) {
      Vec prev = j == 0 ? pts.source : pts.bounces[j - 1].point;
      Vec n = boundary.element_vector_at(b.element_id, b.point);
      double cosi = std::abs((b.point - prev).normalized().dot(n));
      a *= (*hook)(b.element_id, base, cosi);
    } else {
      a *= base;
    }
  }
  return a;
}

std::vector<WeightedAtom> atoms_from_virtual_sources(
    const std::vector<VirtualSource>& sources) {
  std::vector<WeightedAtom> atoms;
  atoms.reserve(sources.size());
  for (const auto& v : sources) {
    WeightedAtom a;
    a.position = v.position;
    a.weight = 1.0;
    a.stratum_dim = 0;
    a.path = v.path;
    a.order = v.order;
    a.validity_residual = v.validity_residual;
    a.grazing = v.grazing;
    atoms.push_back(std::move(a));
  }
  return atoms;
}

SourceMeasure assemble_measure(const Boundary& boundary, const Vec& source,
                               const Vec& receiver,
                               const DirectivityPattern& d_s,
                               const DirectivityPattern& d_r,
                               std::vector<WeightedAtom> atoms,
                               double collocation_eps,
                               const AbsorptionHook* hook) {
  SourceMeasure m;
  m.source = source;
  m.receiver = receiver;
  m.collocation_eps = collocation_eps;
  m.collocated = distance(source, receiver) < collocation_eps;

  for (auto& a : atoms) {
    if (m.collocated && a.path.bounces.empty())
      continue;  // replaced by the direct excitation term
    double d = distance(a.position, receiver);
    if (d < collocation_eps)
      throw CollocatedAtomError(
          "atom at " + a.position.str() + " lies within the " +
          std::to_string(collocation_eps) + " m exclusion ball of the receiver");
    a.absorption = absorption_coeff(a, boundary, hook);
    a.directivity = directivity_coeff(a, d_s, d_r);
    m.atoms.push_back(std::move(a));
  }

  std::stable_sort(m.atoms.begin(), m.atoms.end(),
                   [&](const WeightedAtom& a, const WeightedAtom& b) {
                     double da = distance(a.position, receiver);
                     double db = distance(b.position, receiver);
                     if (da != db) return da < db;
                     if (a.order != b.order) return a.order < b.order;
                     return a.stratum_dim < b.stratum_dim;
                   });
  return m;
}

std::vector<Tap> tap_list(const SourceMeasure& measure, double c) {
  if (!(c > 0)) throw ConfigError("speed of sound must be positive");
  std::vector<Tap> taps;
  taps.reserve(measure.atoms.size() + 1);
  if (measure.collocated) taps.push_back({0.0, 1.0, 0, 0});
  for (const auto& a : measure.atoms) {
    double d = distance(a.position, measure.receiver);
    if (d < measure.collocation_eps)
      throw CollocatedAtomError("atom inside the receiver exclusion ball");
    taps.push_back(
        {d / c, a.weight * a.absorption * a.directivity / d, a.order,
         a.stratum_dim});
  }
  std::stable_sort(taps.begin(), taps.end(), [](const Tap& a, const Tap& b) {
    if (a.delay != b.delay) return a.delay < b.delay;
    return a.amplitude > b.amplitude;
  });
  return taps;
}

namespace {

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

}  // namespace

Signal render_rir(const SourceMeasure& measure, const std::optional<Signal>& f,
                  double c, double out_rate, double duration, RasterMode mode) {
  if (!(out_rate > 0)) throw ConfigError("output sample rate must be positive");
  if (!(duration > 0)) throw ConfigError("render duration must be positive");
  if (f && f->sample_rate != out_rate)
    throw ConfigError("excitation sample rate must match the output rate");

  auto taps = tap_list(measure, c);
  Signal out;
  out.sample_rate = out_rate;
  out.t0 = 0;
  out.samples.assign(static_cast<std::size_t>(std::ceil(duration * out_rate)),
                     0.0);
  const long n = static_cast<long>(out.samples.size());

  // Impulse raster, tap by tap in sorted order (bit-stable accumulation).
  std::vector<double> raster(out.samples.size(), 0.0);
  for (const auto& tap : taps) {
    double center = tap.delay * out_rate;
    if (mode == RasterMode::nearest) {
      long idx = std::lround(center);
      if (idx >= 0 && idx < n) raster[static_cast<std::size_t>(idx)] += tap.amplitude;
    } else {
      const double half_width = 0.002 * out_rate;  // 4 ms Hann window
      long lo = std::max(0L, static_cast<long>(std::ceil(center - half_width)));
      long hi = std::min(n - 1, static_cast<long>(std::floor(center + half_width)));
      for (long k = lo; k <= hi; ++k) {
        double x = k - center;
        double w = 0.5 * (1.0 + std::cos(kPi * x / half_width));
        raster[static_cast<std::size_t>(k)] += tap.amplitude * w * sinc(x);
      }
    }
  }

  if (!f) {
    out.samples = std::move(raster);
    return out;
  }

  // Shifted accumulation of the excitation for every raster sample.
  long f_offset = std::lround(f->t0 * out_rate);
  for (long i = 0; i < n; ++i) {
    double a = raster[static_cast<std::size_t>(i)];
    if (a == 0.0) continue;
    for (std::size_t k = 0; k < f->samples.size(); ++k) {
      long j = i + static_cast<long>(k) + f_offset;
      if (j < 0 || j >= n) continue;
      out.samples[static_cast<std::size_t>(j)] += a * f->samples[k];
    }
  }
  return out;
}

}  // namespace ism
