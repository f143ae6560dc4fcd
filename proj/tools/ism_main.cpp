// SPDX-License-Identifier: Apache-2.0
//
// Image-source simulator CLI.
//
//   ism simulate  --scene room.json --out results/      full pipeline
//   ism sources   --scene room.json                     enumeration only
//   ism check-path --scene room.json --points '[[..]]'  classify one path
//
// Exit codes: 0 ok, 3 parse error, 4 validation error, 5 geometry error,
// 6 collocated atom, 7 configuration error, 8 I/O error, 1 anything else.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ism/pipeline.hpp"

namespace {

void print_summary(const ism::RunSummary& sum) {
  std::printf("atoms per stratum:");
  if (sum.atoms_per_stratum.empty()) std::printf(" none");
  for (const auto& [stratum, count] : sum.atoms_per_stratum)
    std::printf(" dim%d=%zu", stratum, count);
  std::printf("\n");
  std::printf("taps: %zu\n", sum.tap_count);
  if (sum.tap_count > 0)
    std::printf("first arrival: %.9f s\n", sum.first_arrival_s);
  if (!sum.outputs.taps_csv.empty())
    std::printf("wrote %s\n", sum.outputs.taps_csv.c_str());
  if (!sum.outputs.rir_wav.empty())
    std::printf("wrote %s, %s, %s\n", sum.outputs.rir_csv.c_str(),
                sum.outputs.rir_wav.c_str(), sum.outputs.paths_jsonl.c_str());
}

std::vector<ism::Vec> parse_points_arg(const std::string& arg, int dim) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(arg);
  } catch (const nlohmann::json::parse_error& e) {
    throw ism::ParseError(std::string("--points is not valid JSON: ") + e.what());
  }
  if (!j.is_array() || j.size() < 2)
    throw ism::ValidationError("--points must be a JSON array of points");
  std::vector<ism::Vec> pts;
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw ism::ValidationError("each point needs " + std::to_string(dim) +
                                 " coordinates");
    pts.push_back(dim == 2 ? ism::Vec(row[0].get<double>(), row[1].get<double>())
                           : ism::Vec(row[0].get<double>(), row[1].get<double>(),
                                      row[2].get<double>()));
  }
  return pts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Image-source room impulse response simulator"};
  app.require_subcommand(1);

  ism::RunConfig config;
  std::string points_arg;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scene", config.scene_path, "Scene file (JSON)")
        ->required();
    cmd->add_option("--out", config.out_dir, "Output directory");
    cmd->add_option("--max-order", config.max_order, "Reflection order cap");
    cmd->add_option("--lattice-M", config.lattice_M,
                    "Lattice density for curved patches");
    cmd->add_option("--threads", config.threads, "Worker threads");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Run the full pipeline");
  add_common(simulate);
  simulate->add_option("--fs", config.out_rate, "Output sample rate (Hz)");
  simulate->add_option("--duration", config.duration, "Render length (s)");
  simulate->add_option("--excitation", config.excitation,
                       "'impulse' or a CSV file of samples");
  simulate->add_option("--weight-convention", config.weight_convention,
                       "spacing | ball_volume");

  CLI::App* sources = app.add_subcommand("sources", "Enumerate virtual sources");
  add_common(sources);
  sources->add_option("--weight-convention", config.weight_convention,
                      "spacing | ball_volume");

  CLI::App* check = app.add_subcommand("check-path", "Classify a reflection path");
  check->add_option("--scene", config.scene_path, "Scene file (JSON)")->required();
  check->add_option("--points", points_arg,
                    "JSON array of path points, source first, sink last")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      print_summary(ism::run_simulation(config));
    } else if (sources->parsed()) {
      print_summary(ism::run_sources(config));
    } else if (check->parsed()) {
      ism::Scene scene = ism::load_scene(config.scene_path);
      auto pts = parse_points_arg(points_arg, scene.dimension);
      auto report = ism::check_path(scene, pts);
      nlohmann::json j;
      j["valid"] = report.classification.valid;
      j["validity_residual"] = report.classification.validity_residual;
      j["visible"] = report.classification.visible;
      if (report.classification.blocking_element)
        j["blocking_element"] = *report.classification.blocking_element;
      j["grazing"] = report.classification.grazing;
      nlohmann::json pos = nlohmann::json::array();
      for (int i = 0; i < report.image_position.dim(); ++i)
        pos.push_back(report.image_position[i]);
      j["image_position"] = pos;
      j["path_length_m"] = report.length;
      std::cout << j.dump(2) << "\n";
    }
    return 0;
  } catch (const ism::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 3;
  } catch (const ism::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 4;
  } catch (const ism::AmbiguousBoundaryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 5;
  } catch (const ism::DegenerateSegmentError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 5;
  } catch (const ism::DegenerateLineError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 5;
  } catch (const ism::InjectivityViolationError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 5;
  } catch (const ism::CollocatedAtomError& e) {
    std::cerr << "collocation error: " << e.what() << "\n";
    return 6;
  } catch (const ism::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 7;
  } catch (const ism::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 8;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
