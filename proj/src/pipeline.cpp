// SPDX-License-Identifier: Apache-2.0
#include "ism/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace ism {

void apply_overrides(Scene& scene, const RunConfig& config) {
  if (config.max_order) {
    if (*config.max_order < 0) throw ValidationError("max_order must be nonnegative");
    scene.max_order = *config.max_order;
  }
  if (config.lattice_M) {
    if (*config.lattice_M < 2) throw ValidationError("lattice_M must be at least 2");
    scene.lattice_M = *config.lattice_M;
  }
  if (config.out_rate) {
    if (!(*config.out_rate > 0)) throw ValidationError("sample rate must be positive");
    scene.output.sample_rate = *config.out_rate;
  }
  if (config.duration) {
    if (!(*config.duration > 0)) throw ValidationError("duration must be positive");
    scene.output.duration = *config.duration;
  }
  if (config.excitation) scene.output.excitation = *config.excitation;
  if (config.weight_convention) {
    if (*config.weight_convention == "spacing")
      scene.weight_convention = WeightConvention::spacing;
    else if (*config.weight_convention == "ball_volume")
      scene.weight_convention = WeightConvention::ball_volume;
    else
      throw ValidationError("unknown weight_convention '" +
                            *config.weight_convention + "'");
  }
}

namespace {

// Rebuild the boundary so every patch samples at the resolved density; the
// visibility tables and the engine then share one lattice.
Scene resolve_lattice(Scene scene, bool lattice_overridden) {
  if (!lattice_overridden || scene.boundary.patches().empty()) return scene;
  std::vector<CurvedPatch> patches;
  for (const auto& p : scene.boundary.patches()) {
    switch (p.kind()) {
      case PatchKind::circle:
        patches.push_back(CurvedPatch::make_circle(
            p.center(), p.radius(), p.domain_lo()[0], p.domain_hi()[0],
            p.absorption(), p.id(), scene.lattice_M));
        break;
      case PatchKind::sphere:
        patches.push_back(CurvedPatch::make_sphere(
            p.center(), p.radius(), p.domain_hi()[0], p.absorption(), p.id(),
            scene.lattice_M));
        break;
      case PatchKind::cylinder:
        patches.push_back(CurvedPatch::make_cylinder(
            p.axis_base(), p.axis_dir(), p.radius(), p.height(), p.absorption(),
            p.id(), scene.lattice_M));
        break;
      case PatchKind::param_curve:
        patches.push_back(CurvedPatch::make_param_curve(
            p.tables(), p.domain_lo()[0], p.domain_hi()[0], p.absorption(),
            p.id(), scene.lattice_M));
        break;
    }
  }
  scene.boundary = Boundary(scene.boundary.walls(), std::move(patches),
                            scene.boundary.points());
  return scene;
}

Signal load_excitation_csv(const std::string& path, double sample_rate) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open excitation file: " + path);
  Signal f;
  f.sample_rate = sample_rate;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // Accept either one value per line or 't,value' rows with a header.
    std::string cell = line;
    auto comma = line.find(',');
    if (comma != std::string::npos) cell = line.substr(comma + 1);
    try {
      double v = std::stod(cell);
      if (!std::isfinite(v))
        throw ValidationError("excitation file has a non-finite sample");
      f.samples.push_back(v);
    } catch (const std::invalid_argument&) {
      if (f.samples.empty()) continue;  // header row
      throw ParseError("excitation file has a non-numeric row: " + line);
    } catch (const std::out_of_range&) {
      throw ParseError("excitation file has an out-of-range value: " + line);
    }
  }
  if (f.samples.empty()) throw ValidationError("excitation file is empty");
  return f;
}

struct PipelineResult {
  std::vector<WeightedAtom> atoms;
  SourceMeasure measure;
  std::vector<Tap> taps;
};

PipelineResult collect_atoms(const Scene& scene, int threads) {
  const double tol = scene.tolerances.geom_tol;
  std::vector<WeightedAtom> atoms;
  // An exactly coincident pair leaves no geometry to enumerate against; the
  // excitation couples through the collocation tap alone.
  const bool degenerate_pair = distance(scene.source, scene.receiver) <= tol;
  if (!degenerate_pair) {
    auto sources = enumerate_virtual_sources(scene.boundary, scene.source,
                                             scene.receiver, scene.max_order,
                                             tol, threads);
    atoms = atoms_from_virtual_sources(sources);

    // Auto mode backs off to single curved bounces when the order-2
    // candidate set would blow the pair budget; an explicit request errors.
    int curved_order =
        scene.curved_max_order >= 0
            ? scene.curved_max_order
            : std::min({scene.max_order, 2,
                        max_affordable_curved_order(scene.boundary)});
    if (curved_order >= 1 && (!scene.boundary.patches().empty() ||
                              !scene.boundary.points().empty())) {
      auto curved = find_curved_paths(
          scene.boundary, scene.source, scene.receiver, curved_order, /*M=*/0,
          scene.tolerances.angular_tol, scene.weight_convention, threads);
      atoms.insert(atoms.end(), curved.begin(), curved.end());
    }
  }

  PipelineResult res;
  res.measure = assemble_measure(scene.boundary, scene.source, scene.receiver,
                                 scene.source_directivity,
                                 scene.receiver_directivity, atoms,
                                 scene.tolerances.collocation_eps);
  res.atoms = res.measure.atoms;
  res.taps = tap_list(res.measure, scene.speed_of_sound);
  return res;
}

RunSummary summarize(const PipelineResult& res) {
  RunSummary sum;
  for (const auto& a : res.atoms) sum.atoms_per_stratum[a.stratum_dim]++;
  sum.tap_count = res.taps.size();
  sum.first_arrival_s = res.taps.empty() ? 0.0 : res.taps.front().delay;
  sum.taps = res.taps;
  sum.atoms = res.atoms;
  return sum;
}

}  // namespace

RunSummary run_simulation(const RunConfig& config) {
  Scene scene = load_scene(config.scene_path);
  apply_overrides(scene, config);
  scene = resolve_lattice(std::move(scene), config.lattice_M.has_value());

  auto res = collect_atoms(scene, config.threads);

  double duration = scene.output.duration;
  if (duration <= 0) {
    double last = res.taps.empty() ? 0.0 : res.taps.back().delay;
    duration = last + 0.01;
  }
  std::optional<Signal> excitation;
  if (scene.output.excitation != "impulse")
    excitation =
        load_excitation_csv(scene.output.excitation, scene.output.sample_rate);
  RasterMode mode = scene.output.raster == "sinc" ? RasterMode::windowed_sinc
                                                  : RasterMode::nearest;
  Signal rir = render_rir(res.measure, excitation, scene.speed_of_sound,
                          scene.output.sample_rate, duration, mode);

  RunSummary sum = summarize(res);
  if (config.write_files)
    sum.outputs = write_outputs(res.taps, rir, res.atoms, config.out_dir);
  return sum;
}

RunSummary run_sources(const RunConfig& config) {
  Scene scene = load_scene(config.scene_path);
  apply_overrides(scene, config);
  scene = resolve_lattice(std::move(scene), config.lattice_M.has_value());

  auto res = collect_atoms(scene, config.threads);
  RunSummary sum = summarize(res);
  if (config.write_files) {
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + config.out_dir);
    sum.outputs.taps_csv = config.out_dir + "/taps.csv";
    sum.outputs.paths_jsonl = config.out_dir + "/paths.jsonl";
    write_taps_csv(res.taps, sum.outputs.taps_csv);
    write_paths_jsonl(res.atoms, sum.outputs.paths_jsonl);
  }
  return sum;
}

PathReport check_path(const Scene& scene, const std::vector<Vec>& points) {
  if (points.size() < 2)
    throw ValidationError("a path needs at least source and sink");
  ReflectionPath path;
  path.source = points.front();
  path.sink = points.back();
  const double tol = scene.tolerances.geom_tol;
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    // Resolve the element under each reflection point.
    const Vec& p = points[i];
    int id = -1;
    for (const auto& w : scene.boundary.walls())
      if (w.contains(p, tol)) id = w.id();
    if (id < 0)
      for (const auto& pt : scene.boundary.points())
        if (distance(pt.position, p) <= tol) id = pt.id;
    if (id < 0)
      for (const auto& patch : scene.boundary.patches())
        if (patch.nearest(p).first <= 1e-6) id = patch.id();
    if (id < 0)
      throw ValidationError("reflection point " + p.str() +
                            " does not lie on the boundary");
    path.bounces.push_back({p, id});
  }

  PathReport report;
  report.classification = classify_path(path, scene.boundary, tol);
  std::vector<std::pair<Vec, Vec>> refl;
  for (const auto& b : path.bounces)
    refl.emplace_back(b.point,
                      scene.boundary.element_vector_at(b.element_id, b.point));
  report.image_position = compose_projections(path.source, refl);
  report.length = path_length(path);
  return report;
}

}  // namespace ism
