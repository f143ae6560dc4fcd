// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ism/pipeline.hpp"

using namespace ism;

#ifndef ISM_SCENES_DIR
#define ISM_SCENES_DIR "scenes"
#endif

namespace {

std::string scene(const std::string& name) {
  return std::string(ISM_SCENES_DIR) + "/" + name;
}

std::string temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("ism_pipeline_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("shoebox at order 1 reports five atoms") {
  RunConfig cfg;
  cfg.scene_path = scene("shoebox.json");
  cfg.out_dir = temp_dir("shoebox");
  cfg.max_order = 1;
  auto sum = run_simulation(cfg);
  CHECK(sum.atoms_per_stratum[0] == 5);
  CHECK(sum.tap_count == 5);
  CHECK(std::filesystem::exists(sum.outputs.taps_csv));
  CHECK(std::filesystem::exists(sum.outputs.rir_wav));
  CHECK(std::filesystem::exists(sum.outputs.paths_jsonl));
}

TEST_CASE("free field yields one atom at the direct arrival time") {
  RunConfig cfg;
  cfg.scene_path = scene("freefield.json");
  cfg.out_dir = temp_dir("freefield");
  auto sum = run_simulation(cfg);
  CHECK(sum.tap_count == 1);
  CHECK(sum.first_arrival_s == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("circle run produces a continuum stratum and a lone direct atom") {
  RunConfig cfg;
  cfg.scene_path = scene("circle.json");
  cfg.out_dir = temp_dir("circle");
  cfg.lattice_M = 1000;
  auto sum = run_simulation(cfg);
  CHECK(sum.atoms_per_stratum[1] > 0);
  CHECK(sum.atoms_per_stratum[0] == 1);

  // every exported path rides within the lattice-scaled residual
  Scene sc = load_scene(cfg.scene_path);
  for (const auto& a : sum.atoms)
    if (a.order > 0) CHECK(a.validity_residual <= 3e-3);
}

TEST_CASE("identical configs are byte-identical across thread counts") {
  for (const char* name : {"shoebox.json", "circle.json"}) {
    std::string base;
    for (int threads : {1, 2, 8}) {
      RunConfig cfg;
      cfg.scene_path = scene(name);
      cfg.out_dir = temp_dir(std::string("det_") + name + std::to_string(threads));
      cfg.threads = threads;
      auto sum = run_simulation(cfg);
      std::string taps = slurp(sum.outputs.taps_csv);
      std::string rir = slurp(sum.outputs.rir_csv);
      if (base.empty())
        base = taps + rir;
      else
        CHECK(base == taps + rir);
    }
  }
}

TEST_CASE("sources subcommand writes taps and path diagnostics only") {
  RunConfig cfg;
  cfg.scene_path = scene("corridor.json");
  cfg.out_dir = temp_dir("sources");
  auto sum = run_sources(cfg);
  CHECK(sum.tap_count > 1);
  CHECK(std::filesystem::exists(sum.outputs.taps_csv));
  CHECK(!std::filesystem::exists(cfg.out_dir + "/rir.wav"));
}

TEST_CASE("check_path classifies a hand-built mirror path") {
  Scene sc = load_scene(scene("shoebox.json"));
  // bounce off the left wall: s=(0.3,0.3) -> (0, 1/3) -> r=(0.6,0.4)
  auto report = check_path(sc, {Vec(0.3, 0.3), Vec(0, 1.0 / 3), Vec(0.6, 0.4)});
  CHECK(report.classification.valid);
  CHECK(report.classification.visible);
  CHECK(distance(report.image_position, Vec(-0.3, 0.3)) < 1e-9);

  // same geometry, wrong bounce point
  auto bad = check_path(sc, {Vec(0.3, 0.3), Vec(0, 0.8), Vec(0.6, 0.4)});
  CHECK(!bad.classification.valid);

  // a point off the boundary is rejected outright
  CHECK_THROWS_AS(check_path(sc, {Vec(0.3, 0.3), Vec(0.5, 0.5), Vec(0.6, 0.4)}),
                  ValidationError);
}

TEST_CASE("overrides are validated like scene fields") {
  RunConfig cfg;
  cfg.scene_path = scene("shoebox.json");
  cfg.out_dir = temp_dir("bad_override");
  cfg.max_order = -1;
  CHECK_THROWS_AS(run_simulation(cfg), ValidationError);
  cfg.max_order.reset();
  cfg.lattice_M = 1;
  CHECK_THROWS_AS(run_simulation(cfg), ValidationError);
  cfg.lattice_M.reset();
  cfg.weight_convention = "bogus";
  CHECK_THROWS_AS(run_simulation(cfg), ValidationError);
}

TEST_CASE("excitation files drive the render") {
  auto dir = temp_dir("excitation");
  std::string exc_path = dir + "/pulse.csv";
  {
    std::ofstream out(exc_path);
    out << "1.0\n-1.0\n";
  }
  RunConfig cfg;
  cfg.scene_path = scene("freefield.json");
  cfg.out_dir = dir;
  cfg.excitation = exc_path;
  auto sum = run_simulation(cfg);
  CHECK(sum.tap_count == 1);
  std::string rir = slurp(dir + "/rir.csv");
  CHECK(rir.find("-0.29154") != std::string::npos);  // -1/3.43 on the tail
}

TEST_CASE("an exactly collocated pair couples through the unit tap") {
  auto dir = temp_dir("collocated");
  std::string scene_path = dir + "/scene.json";
  {
    std::ofstream out(scene_path);
    out << R"({
      "dimension": 2,
      "walls": [{"vertices": [[-5,-1],[5,-1]]}],
      "source": {"position": [1.0, 1.0]},
      "receiver": {"position": [1.0, 1.0]},
      "simulation": {"max_order": 2, "output": {"duration": 0.05}}
    })";
  }
  RunConfig cfg;
  cfg.scene_path = scene_path;
  cfg.out_dir = dir;
  auto sum = run_simulation(cfg);
  REQUIRE(sum.tap_count == 1);
  CHECK(sum.taps[0].delay == 0.0);
  CHECK(sum.taps[0].amplitude == 1.0);
}

TEST_CASE("missing scene files surface as I/O errors") {
  RunConfig cfg;
  cfg.scene_path = "/nonexistent/scene.json";
  CHECK_THROWS_AS(run_simulation(cfg), IoError);
}
