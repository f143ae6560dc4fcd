// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>

#include "ism/scene.hpp"

namespace ism {

/// CLI-level run description: the scene file plus overrides.  Overrides are
/// validated exactly like the scene fields they replace.
struct RunConfig {
  std::string scene_path;
  std::string out_dir = "out";
  std::optional<int> max_order;
  std::optional<int> lattice_M;
  std::optional<double> out_rate;
  std::optional<double> duration;
  std::optional<std::string> excitation;  // "impulse" or a CSV file path
  std::optional<std::string> weight_convention;
  int threads = 1;
  std::uint64_t seed = 0;  // reserved for test harnesses
  bool write_files = true;
};

struct RunSummary {
  std::map<int, std::size_t> atoms_per_stratum;
  std::size_t tap_count = 0;
  double first_arrival_s = 0;
  std::vector<Tap> taps;
  std::vector<WeightedAtom> atoms;
  OutputPaths outputs;
};

/// Applies config overrides to a parsed scene.
void apply_overrides(Scene& scene, const RunConfig& config);

/// Full pipeline: parse -> enumerate -> sample -> render -> write.
/// Throws on failure; byte-stable outputs for identical configs and any
/// thread count.
RunSummary run_simulation(const RunConfig& config);

/// Enumeration only (no rendering, no audio outputs).
RunSummary run_sources(const RunConfig& config);

/// Classifies a user-supplied path in the scene: element ids are resolved
/// from the geometry, then validity, visibility, and the image position are
/// reported.
struct PathReport {
  PathClassification classification;
  Vec image_position;
  double length = 0;
};
PathReport check_path(const Scene& scene, const std::vector<Vec>& points);

}  // namespace ism
