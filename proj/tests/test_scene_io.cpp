// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "ism/scene.hpp"

using namespace ism;

#ifndef ISM_SCENES_DIR
#define ISM_SCENES_DIR "scenes"
#endif

namespace {

std::string scenes_dir() { return ISM_SCENES_DIR; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("a minimal free-field scene parses to an empty boundary") {
  Scene s = parse_scene(R"({
    "dimension": 2,
    "source": {"position": [0, 0]},
    "receiver": {"position": [1, 0]}
  })");
  CHECK(s.boundary.empty());
  CHECK(s.speed_of_sound == 343.0);
  CHECK(s.max_order == 6);
  CHECK(s.source_directivity.kind == DirectivityPattern::Kind::omni);
}

TEST_CASE("shoebox fixture gives four walls with inferred normals") {
  Scene s = parse_scene(slurp(scenes_dir() + "/shoebox.json"));
  REQUIRE(s.boundary.walls().size() == 4);
  for (const auto& w : s.boundary.walls()) {
    CHECK(is_unit(w.normal(), 1e-12));
    // axis-aligned
    CHECK((std::abs(w.normal().x()) < 1e-12 || std::abs(w.normal().y()) < 1e-12));
  }
}

TEST_CASE("corridor fixture walls reflect from either side") {
  Scene s = parse_scene(slurp(scenes_dir() + "/corridor.json"));
  REQUIRE(s.boundary.walls().size() == 2);
  // membership is purely geometric: the same wall answers on both sides
  const auto& w = s.boundary.walls()[0];
  CHECK(w.contains(Vec(0, 1), 1e-9));
  Vec above = symmetric_project(Vec(0, 0.5), Vec(0, 1), w.normal());
  CHECK(above.y() == doctest::Approx(1.5));
}

TEST_CASE("circle fixture parses its patch with the configured density") {
  Scene s = parse_scene(slurp(scenes_dir() + "/circle.json"));
  REQUIRE(s.boundary.patches().size() == 1);
  CHECK(s.boundary.patches()[0].kind() == PatchKind::circle);
  CHECK(s.boundary.patches()[0].lattice_M() == 1000);
  CHECK(s.lattice_M == 1000);
}

TEST_CASE("round trip: parse(serialize(scene)) == scene for every fixture") {
  for (const char* name : {"shoebox.json", "freefield.json", "corridor.json",
                           "circle.json"}) {
    Scene a = parse_scene(slurp(scenes_dir() + "/" + name));
    Scene b = parse_scene(serialize_scene(a));
    CHECK(a == b);
    CHECK(serialize_scene(a) == serialize_scene(b));
  }
}

TEST_CASE("point reflectors parse with normalized vectors") {
  Scene s = parse_scene(R"({
    "dimension": 2,
    "point_reflectors": [{"position": [2,0], "vector": [2,0], "absorption": 0.5}],
    "source": {"position": [0,0]},
    "receiver": {"position": [1,1]}
  })");
  REQUIRE(s.boundary.points().size() == 1);
  CHECK(is_unit(s.boundary.points()[0].vector, 1e-12));
  CHECK(s.boundary.points()[0].absorption == 0.5);
  Scene back = parse_scene(serialize_scene(s));
  CHECK(s == back);
}

TEST_CASE("explicit normals win over winding, sign-insensitively") {
  Scene s = parse_scene(R"({
    "dimension": 2,
    "walls": [{"vertices": [[0,0],[1,0]], "normal": [0,-1]}],
    "source": {"position": [0.2, 0.5]},
    "receiver": {"position": [0.8, 0.5]}
  })");
  CHECK(s.boundary.walls()[0].normal().y() == doctest::Approx(-1.0));
  // reflection is unaffected by the stored sign
  const auto& w = s.boundary.walls()[0];
  Vec img = symmetric_project(Vec(0.2, 0.5), Vec(0.5, 0), w.normal());
  CHECK(distance(img, Vec(0.2, -0.5)) < 1e-12);
}

TEST_CASE("syntax errors and invariant violations are distinguished") {
  CHECK_THROWS_AS(parse_scene("{ not json"), ParseError);
  // absorption out of range
  CHECK_THROWS_AS(parse_scene(R"({
    "dimension": 2,
    "walls": [{"vertices": [[0,0],[1,0]], "absorption": 1.5}],
    "source": {"position": [0,1]}, "receiver": {"position": [1,1]}
  })"),
                  ValidationError);
  // wall vertex off its stated plane
  CHECK_THROWS_AS(parse_scene(R"({
    "dimension": 3,
    "walls": [{"vertices": [[0,0,0],[1,0,0],[1,1,0.2],[0,1,0]]}],
    "source": {"position": [0,0,1]}, "receiver": {"position": [1,1,1]}
  })"),
                  ValidationError);
  // dimension mismatch in a coordinate
  CHECK_THROWS_AS(parse_scene(R"({
    "dimension": 2,
    "source": {"position": [0,0,0]}, "receiver": {"position": [1,1]}
  })"),
                  ValidationError);
  // curved order beyond the supported cap
  CHECK_THROWS_AS(parse_scene(R"({
    "dimension": 2,
    "source": {"position": [0,0]}, "receiver": {"position": [1,1]},
    "simulation": {"curved_max_order": 3}
  })"),
                  ValidationError);
  // unknown directivity kind
  CHECK_THROWS_AS(parse_scene(R"({
    "dimension": 2,
    "source": {"position": [0,0], "directivity": {"kind": "laser"}},
    "receiver": {"position": [1,1]}
  })"),
                  ValidationError);
}

TEST_CASE("taps csv uses the documented header and row shape") {
  std::vector<Tap> taps = {{0.01, 0.5, 0, 0}, {0.02, 0.25, 1, 0}};
  auto dir = std::filesystem::temp_directory_path() / "ism_scene_io_test";
  std::filesystem::create_directories(dir);
  auto path = (dir / "taps.csv").string();
  write_taps_csv(taps, path);
  std::string text = slurp(path);
  CHECK(text.rfind("delay_s,amplitude,order,stratum_dim\n", 0) == 0);
  CHECK(text.find("0.01,0.5,0,0\n") != std::string::npos);
}

TEST_CASE("wav files carry 32-bit float mono frames") {
  Signal sig;
  sig.sample_rate = 48000;
  sig.samples = {0.0, 0.5, -0.5, 1.0};
  auto dir = std::filesystem::temp_directory_path() / "ism_scene_io_test";
  std::filesystem::create_directories(dir);
  auto path = (dir / "x.wav").string();
  write_wav(sig, path);

  std::string bytes = slurp(path);
  REQUIRE(bytes.size() > 44);
  CHECK(bytes.substr(0, 4) == "RIFF");
  CHECK(bytes.substr(8, 4) == "WAVE");
  CHECK(bytes.find("data") != std::string::npos);
  // format tag 3 = IEEE float
  CHECK(static_cast<unsigned char>(bytes[20]) == 3);
  // four bytes per frame at the end: read back the last sample
  float last;
  std::memcpy(&last, bytes.data() + bytes.size() - 4, 4);
  CHECK(last == doctest::Approx(1.0f));
}

TEST_CASE("paths jsonl writes one record per surviving path") {
  WeightedAtom a;
  a.position = Vec(-0.3, 0.3);
  a.order = 1;
  a.stratum_dim = 0;
  a.path = {Vec(0.3, 0.3), {{Vec(0, 1.0 / 3), 0}}, Vec(0.6, 0.4)};
  auto dir = std::filesystem::temp_directory_path() / "ism_scene_io_test";
  std::filesystem::create_directories(dir);
  auto path = (dir / "paths.jsonl").string();
  write_paths_jsonl({a, a}, path);
  std::string text = slurp(path);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.find("\"order\":1") != std::string::npos);
  CHECK(text.find("\"elements\":[0]") != std::string::npos);
}
