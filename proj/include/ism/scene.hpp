// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "ism/rir.hpp"

namespace ism {

struct Tolerances {
  double geom_tol = 1e-9;
  double angular_tol = 0.0;  // <= 0: lattice-scaled default
  double collocation_eps = 1e-3;

  bool operator==(const Tolerances&) const = default;
};

struct OutputConfig {
  double sample_rate = 48000;
  double duration = 0.0;  // <= 0: sized to the last arrival
  std::string excitation = "impulse";
  std::string raster = "nearest";  // or "sinc"

  bool operator==(const OutputConfig&) const = default;
};

/// Full simulation input: boundary, endpoints, and run parameters.
struct Scene {
  int dimension = 2;
  double speed_of_sound = 343.0;
  Boundary boundary;
  Vec source;
  Vec receiver;
  DirectivityPattern source_directivity;
  DirectivityPattern receiver_directivity;
  int max_order = 6;
  int curved_max_order = -1;  // -1: min(max_order, 2)
  int lattice_M = 256;
  WeightConvention weight_convention = WeightConvention::spacing;
  Tolerances tolerances;
  OutputConfig output;
};

bool operator==(const Scene& a, const Scene& b);

/// Parses and fully validates a scene document (JSON).  Wall normals are
/// inferred from vertex winding when omitted; the stored sign never affects
/// results.  Throws ParseError for malformed text and ValidationError for
/// violated invariants.
Scene parse_scene(const std::string& text);
Scene load_scene(const std::string& path);

/// Serializes a scene back to its document form; parse(serialize(s)) == s.
std::string serialize_scene(const Scene& scene);

// ---------------------------------------------------------------------------
// Result writers
// ---------------------------------------------------------------------------

void write_taps_csv(const std::vector<Tap>& taps, const std::string& path);
void write_signal_csv(const Signal& signal, const std::string& path);
/// 32-bit float PCM WAV, mono.
void write_wav(const Signal& signal, const std::string& path);
/// One reflection path per line: points, element sequence, residual,
/// visibility and grazing flags, virtual-source position and weight.
void write_paths_jsonl(const std::vector<WeightedAtom>& atoms,
                       const std::string& path);

struct OutputPaths {
  std::string taps_csv;
  std::string rir_csv;
  std::string rir_wav;
  std::string paths_jsonl;
};

/// Writes taps.csv, rir.csv, rir.wav, and paths.jsonl under out_dir
/// (created when missing) and returns the file locations.
OutputPaths write_outputs(const std::vector<Tap>& taps, const Signal& signal,
                          const std::vector<WeightedAtom>& atoms,
                          const std::string& out_dir);

}  // namespace ism
