// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ism/curved.hpp"
#include "ism/planar.hpp"

namespace ism {

/// Gain as a function of direction on the unit sphere around a source or
/// receiver.  Tabulated patterns interpolate linearly between the nearest
/// table directions.
struct DirectivityPattern {
  enum class Kind { omni, cardioid, tabulated };
  Kind kind = Kind::omni;
  Vec axis;  // cardioid aim direction (unit)
  std::vector<std::pair<Vec, double>> table;

  static DirectivityPattern omni() { return {}; }
  static DirectivityPattern cardioid(const Vec& aim);
  static DirectivityPattern tabulated(std::vector<std::pair<Vec, double>> entries);

  /// Gain toward the unit direction `dir`.
  double eval(const Vec& dir) const;
};

/// Optional per-bounce absorption override.  Receives the element id, the
/// element's base absorption, and |cos| of the incidence angle against the
/// field vector; returns the retained-amplitude factor for that bounce.
using AbsorptionHook =
    std::function<double(int element_id, double base_absorption, double cos_incidence)>;

/// Product of source gain toward the first reflection point and receiver
/// gain toward the last; the direct path uses the receiver and source
/// positions instead.
double directivity_coeff(const WeightedAtom& atom, const DirectivityPattern& d_s,
                         const DirectivityPattern& d_r);

/// Product of the per-bounce retained-amplitude factors (1 keeps all energy,
/// 0 kills the path).  The direct path's empty product is 1.
double absorption_coeff(const WeightedAtom& atom, const Boundary& boundary,
                        const AbsorptionHook* hook = nullptr);

/// The assembled virtual-source measure for one source/receiver pair:
/// a finite list of weighted atoms with their amplitude factors filled in.
struct SourceMeasure {
  std::vector<WeightedAtom> atoms;
  Vec source;
  Vec receiver;
  /// Source and receiver within collocation_eps: the excitation couples
  /// directly and the direct atom is replaced by a unit zero-delay tap.
  bool collocated = false;
  double collocation_eps = 1e-3;
};

/// Converts discrete image sources to unit-weight atoms.
std::vector<WeightedAtom> atoms_from_virtual_sources(
    const std::vector<VirtualSource>& sources);

/// Fills absorption and directivity factors, sorts atoms deterministically,
/// and enforces the receiver exclusion ball.  Throws CollocatedAtomError when
/// an atom other than the direct one sits within collocation_eps of the
/// receiver.
SourceMeasure assemble_measure(const Boundary& boundary, const Vec& source,
                               const Vec& receiver,
                               const DirectivityPattern& d_s,
                               const DirectivityPattern& d_r,
                               std::vector<WeightedAtom> atoms,
                               double collocation_eps = 1e-3,
                               const AbsorptionHook* hook = nullptr);

/// One impulse-response contribution: amplitude carries the atom weight, the
/// absorption and directivity products, and the 1/distance spreading loss.
struct Tap {
  double delay = 0;      // seconds
  double amplitude = 0;  // 1/meters
  int order = 0;
  int stratum_dim = 0;
};

/// Exact pre-rasterization view of the impulse response: sorted by delay,
/// deterministic.
std::vector<Tap> tap_list(const SourceMeasure& measure, double c);

/// Uniformly sampled real signal.  t0 is the time of samples[0].
struct Signal {
  std::vector<double> samples;
  double sample_rate = 48000;
  double t0 = 0;
};

enum class RasterMode {
  nearest,        // fractional delays round to the nearest sample
  windowed_sinc,  // band-limited taps (Hann-windowed sinc, 4 ms support)
};

/// Renders the impulse response at out_rate over [0, duration).  Without an
/// excitation each tap lands as a scaled impulse; with one, each tap adds a
/// shifted copy of the excitation (whose sample rate must equal out_rate).
Signal render_rir(const SourceMeasure& measure, const std::optional<Signal>& f,
                  double c, double out_rate, double duration,
                  RasterMode mode = RasterMode::nearest);

}  // namespace ism
