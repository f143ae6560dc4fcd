// SPDX-License-Identifier: Apache-2.0
#include "ism/scene.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

namespace ism {

using nlohmann::json;

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

Vec vec_from_json(const json& j, int dim, const std::string& field) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw ValidationError(field + " must be an array of " +
                          std::to_string(dim) + " numbers");
  for (const auto& v : j)
    if (!v.is_number() || !std::isfinite(v.get<double>()))
      throw ValidationError(field + " has a non-finite coordinate");
  return dim == 2 ? Vec(j[0].get<double>(), j[1].get<double>())
                  : Vec(j[0].get<double>(), j[1].get<double>(),
                        j[2].get<double>());
}

json vec_to_json(const Vec& v) {
  json j = json::array();
  for (int i = 0; i < v.dim(); ++i) j.push_back(v[i]);
  return j;
}

double get_number(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw ValidationError("field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer())
    throw ValidationError("field '" + key + "' must be an integer");
  return j.at(key).get<int>();
}

double get_absorption(const json& j) {
  double a = get_number(j, "absorption", 1.0);
  require(a >= 0.0 && a <= 1.0, "absorption outside [0,1]");
  return a;
}

DirectivityPattern directivity_from_json(const json& j, int dim) {
  if (j.is_null()) return DirectivityPattern::omni();
  require(j.is_object() && j.contains("kind"),
          "directivity must be an object with a 'kind'");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "omni") return DirectivityPattern::omni();
  if (kind == "cardioid") {
    require(j.contains("axis"), "cardioid directivity needs an 'axis'");
    return DirectivityPattern::cardioid(
        vec_from_json(j.at("axis"), dim, "directivity.axis").normalized());
  }
  if (kind == "tabulated") {
    require(j.contains("table") && j.at("table").is_array() &&
                !j.at("table").empty(),
            "tabulated directivity needs a nonempty 'table'");
    std::vector<std::pair<Vec, double>> entries;
    for (const auto& row : j.at("table")) {
      Vec dir = vec_from_json(row.at("direction"), dim, "table.direction");
      require(is_unit(dir, 1e-9), "tabulated direction is not unit length");
      entries.emplace_back(dir, row.at("gain").get<double>());
    }
    return DirectivityPattern::tabulated(std::move(entries));
  }
  throw ValidationError("unknown directivity kind '" + kind + "'");
}

json directivity_to_json(const DirectivityPattern& d) {
  json j;
  switch (d.kind) {
    case DirectivityPattern::Kind::omni:
      j["kind"] = "omni";
      break;
    case DirectivityPattern::Kind::cardioid:
      j["kind"] = "cardioid";
      j["axis"] = vec_to_json(d.axis);
      break;
    case DirectivityPattern::Kind::tabulated: {
      j["kind"] = "tabulated";
      json table = json::array();
      for (const auto& [dir, gain] : d.table)
        table.push_back({{"direction", vec_to_json(dir)}, {"gain", gain}});
      j["table"] = std::move(table);
      break;
    }
  }
  return j;
}

std::vector<std::vector<double>> coef_table_from_json(const json& j,
                                                      const std::string& key) {
  std::vector<std::vector<double>> out;
  if (!j.contains(key)) return out;
  require(j.at(key).is_array(), "'" + key + "' must be an array of arrays");
  for (const auto& row : j.at(key)) {
    std::vector<double> r;
    for (const auto& v : row) {
      require(v.is_number() && std::isfinite(v.get<double>()),
              "'" + key + "' has a non-finite coefficient");
      r.push_back(v.get<double>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

Scene parse_scene(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scene is not valid JSON: ") + e.what());
  }
  try {
    require(doc.is_object(), "scene document must be a JSON object");

    Scene scene;
    scene.dimension = get_int(doc, "dimension", 2);
    require(scene.dimension == 2 || scene.dimension == 3,
            "dimension must be 2 or 3");
    scene.speed_of_sound = get_number(doc, "speed_of_sound", 343.0);
    require(scene.speed_of_sound > 0, "speed_of_sound must be positive");
    const int dim = scene.dimension;

    int next_id = 0;
    std::vector<PlanarWall> walls;
    if (doc.contains("walls")) {
      require(doc.at("walls").is_array(), "'walls' must be an array");
      for (const auto& jw : doc.at("walls")) {
        require(jw.contains("vertices") && jw.at("vertices").is_array(),
                "wall needs a 'vertices' array");
        std::vector<Vec> vertices;
        for (const auto& v : jw.at("vertices"))
          vertices.push_back(vec_from_json(v, dim, "wall vertex"));
        std::optional<Vec> normal;
        if (jw.contains("normal"))
          normal = vec_from_json(jw.at("normal"), dim, "wall normal");
        walls.push_back(PlanarWall::make(std::move(vertices), normal,
                                         get_absorption(jw), next_id++));
      }
    }

    const json sim = doc.contains("simulation") ? doc.at("simulation") : json::object();
    scene.max_order = get_int(sim, "max_order", 6);
    require(scene.max_order >= 0, "max_order must be nonnegative");
    scene.curved_max_order = get_int(sim, "curved_max_order", -1);
    require(scene.curved_max_order <= 2,
            "curved reflections beyond order 2 are not supported");
    scene.lattice_M = get_int(sim, "lattice_M", 256);
    require(scene.lattice_M >= 2, "lattice_M must be at least 2");
    if (sim.contains("weight_convention")) {
      std::string w = sim.at("weight_convention").get<std::string>();
      if (w == "spacing")
        scene.weight_convention = WeightConvention::spacing;
      else if (w == "ball_volume")
        scene.weight_convention = WeightConvention::ball_volume;
      else
        throw ValidationError("unknown weight_convention '" + w + "'");
    }
    if (sim.contains("tolerances")) {
      const json& t = sim.at("tolerances");
      scene.tolerances.geom_tol = get_number(t, "geom_tol", 1e-9);
      scene.tolerances.angular_tol = get_number(t, "angular_tol", 0.0);
      scene.tolerances.collocation_eps = get_number(t, "collocation_eps", 1e-3);
      require(scene.tolerances.geom_tol > 0, "geom_tol must be positive");
      require(scene.tolerances.collocation_eps > 0,
              "collocation_eps must be positive");
    }
    if (sim.contains("output")) {
      const json& o = sim.at("output");
      scene.output.sample_rate = get_number(o, "sample_rate", 48000.0);
      require(scene.output.sample_rate > 0, "sample_rate must be positive");
      scene.output.duration = get_number(o, "duration", 0.0);
      if (o.contains("excitation"))
        scene.output.excitation = o.at("excitation").get<std::string>();
      if (o.contains("raster")) {
        scene.output.raster = o.at("raster").get<std::string>();
        require(scene.output.raster == "nearest" || scene.output.raster == "sinc",
                "raster must be 'nearest' or 'sinc'");
      }
    }

    std::vector<CurvedPatch> patches;
    if (doc.contains("patches")) {
      require(doc.at("patches").is_array(), "'patches' must be an array");
      for (const auto& jp : doc.at("patches")) {
        require(jp.contains("type"), "patch needs a 'type'");
        std::string type = jp.at("type").get<std::string>();
        double absorption = get_absorption(jp);
        int M = get_int(jp, "M", scene.lattice_M);
        int id = next_id++;
        if (type == "circle") {
          require(dim == 2, "circle patches require a 2D scene");
          Vec center = vec_from_json(jp.at("center"), 2, "circle center");
          double radius = get_number(jp, "radius", 0.0);
          double a0 = 0, a1 = 2 * std::numbers::pi;
          if (jp.contains("arc")) {
            const auto& arc = jp.at("arc");
            require(arc.is_array() && arc.size() == 2,
                    "circle arc must be [begin, end]");
            a0 = arc[0].get<double>();
            a1 = arc[1].get<double>();
          }
          patches.push_back(
              CurvedPatch::make_circle(center, radius, a0, a1, absorption, id, M));
        } else if (type == "sphere") {
          require(dim == 3, "sphere patches require a 3D scene");
          Vec center = vec_from_json(jp.at("center"), 3, "sphere center");
          double radius = get_number(jp, "radius", 0.0);
          double cap = get_number(jp, "cap", std::numbers::pi);
          patches.push_back(
              CurvedPatch::make_sphere(center, radius, cap, absorption, id, M));
        } else if (type == "cylinder") {
          require(dim == 3, "cylinder patches require a 3D scene");
          Vec base = vec_from_json(jp.at("base"), 3, "cylinder base");
          Vec axis = vec_from_json(jp.at("axis"), 3, "cylinder axis");
          patches.push_back(CurvedPatch::make_cylinder(
              base, axis, get_number(jp, "radius", 0.0),
              get_number(jp, "height", 0.0), absorption, id, M));
        } else if (type == "param") {
          require(dim == 2, "param patches describe plane curves (2D scenes)");
          require(jp.contains("domain") && jp.at("domain").is_array() &&
                      jp.at("domain").size() == 2,
                  "param patch needs a 'domain' [lo, hi]");
          ParamTables tables;
          tables.poly = coef_table_from_json(jp, "poly");
          tables.cos_coef = coef_table_from_json(jp, "cos");
          tables.sin_coef = coef_table_from_json(jp, "sin");
          tables.omega = get_number(jp, "omega", 1.0);
          auto fix2 = [](std::vector<std::vector<double>>& t) {
            require(t.size() <= 2, "param coefficient tables have two rows");
            t.resize(2);
          };
          fix2(tables.poly);
          fix2(tables.cos_coef);
          fix2(tables.sin_coef);
          patches.push_back(CurvedPatch::make_param_curve(
              tables, jp.at("domain")[0].get<double>(),
              jp.at("domain")[1].get<double>(), absorption, id, M));
        } else {
          throw ValidationError("unknown patch type '" + type + "'");
        }
      }
    }

    std::vector<PointReflector> points;
    if (doc.contains("point_reflectors")) {
      require(doc.at("point_reflectors").is_array(),
              "'point_reflectors' must be an array");
      for (const auto& jp : doc.at("point_reflectors")) {
        PointReflector p;
        p.position = vec_from_json(jp.at("position"), dim, "reflector position");
        p.vector =
            vec_from_json(jp.at("vector"), dim, "reflector vector").normalized();
        require(p.vector.norm() > 0.5, "reflector vector is zero");
        p.absorption = get_absorption(jp);
        p.id = next_id++;
        points.push_back(std::move(p));
      }
    }

    scene.boundary =
        Boundary(std::move(walls), std::move(patches), std::move(points));
    if (!scene.boundary.empty())
      require(scene.boundary.dim() == dim,
              "boundary elements do not match the scene dimension");

    require(doc.contains("source") && doc.at("source").contains("position"),
            "scene needs source.position");
    require(doc.contains("receiver") && doc.at("receiver").contains("position"),
            "scene needs receiver.position");
    scene.source =
        vec_from_json(doc.at("source").at("position"), dim, "source.position");
    scene.receiver = vec_from_json(doc.at("receiver").at("position"), dim,
                                   "receiver.position");
    scene.source_directivity = directivity_from_json(
        doc.at("source").contains("directivity") ? doc.at("source").at("directivity")
                                                 : json(),
        dim);
    scene.receiver_directivity = directivity_from_json(
        doc.at("receiver").contains("directivity")
            ? doc.at("receiver").at("directivity")
            : json(),
        dim);
    return scene;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed scene field: ") + e.what());
  }
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scene file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_scene(text);
}

std::string serialize_scene(const Scene& scene) {
  json doc;
  doc["dimension"] = scene.dimension;
  doc["speed_of_sound"] = scene.speed_of_sound;

  json walls = json::array();
  for (const auto& w : scene.boundary.walls()) {
    json jw;
    json vs = json::array();
    for (const auto& v : w.vertices()) vs.push_back(vec_to_json(v));
    jw["vertices"] = std::move(vs);
    jw["normal"] = vec_to_json(w.normal());
    jw["absorption"] = w.absorption();
    walls.push_back(std::move(jw));
  }
  if (!walls.empty()) doc["walls"] = std::move(walls);

  json patches = json::array();
  for (const auto& p : scene.boundary.patches()) {
    json jp;
    jp["absorption"] = p.absorption();
    jp["M"] = p.lattice_M();
    switch (p.kind()) {
      case PatchKind::circle:
        jp["type"] = "circle";
        jp["center"] = vec_to_json(p.center());
        jp["radius"] = p.radius();
        jp["arc"] = {p.domain_lo()[0], p.domain_hi()[0]};
        break;
      case PatchKind::sphere:
        jp["type"] = "sphere";
        jp["center"] = vec_to_json(p.center());
        jp["radius"] = p.radius();
        jp["cap"] = p.domain_hi()[0];
        break;
      case PatchKind::cylinder:
        jp["type"] = "cylinder";
        jp["base"] = vec_to_json(p.axis_base());
        jp["axis"] = vec_to_json(p.axis_dir());
        jp["radius"] = p.radius();
        jp["height"] = p.height();
        break;
      case PatchKind::param_curve:
        jp["type"] = "param";
        jp["domain"] = {p.domain_lo()[0], p.domain_hi()[0]};
        jp["poly"] = p.tables().poly;
        jp["cos"] = p.tables().cos_coef;
        jp["sin"] = p.tables().sin_coef;
        jp["omega"] = p.tables().omega;
        break;
    }
    patches.push_back(std::move(jp));
  }
  if (!patches.empty()) doc["patches"] = std::move(patches);

  json points = json::array();
  for (const auto& p : scene.boundary.points()) {
    points.push_back({{"position", vec_to_json(p.position)},
                      {"vector", vec_to_json(p.vector)},
                      {"absorption", p.absorption}});
  }
  if (!points.empty()) doc["point_reflectors"] = std::move(points);

  doc["source"] = {{"position", vec_to_json(scene.source)},
                   {"directivity", directivity_to_json(scene.source_directivity)}};
  doc["receiver"] = {
      {"position", vec_to_json(scene.receiver)},
      {"directivity", directivity_to_json(scene.receiver_directivity)}};

  json sim;
  sim["max_order"] = scene.max_order;
  sim["curved_max_order"] = scene.curved_max_order;
  sim["lattice_M"] = scene.lattice_M;
  sim["weight_convention"] =
      scene.weight_convention == WeightConvention::spacing ? "spacing"
                                                           : "ball_volume";
  sim["tolerances"] = {{"geom_tol", scene.tolerances.geom_tol},
                       {"angular_tol", scene.tolerances.angular_tol},
                       {"collocation_eps", scene.tolerances.collocation_eps}};
  sim["output"] = {{"sample_rate", scene.output.sample_rate},
                   {"duration", scene.output.duration},
                   {"excitation", scene.output.excitation},
                   {"raster", scene.output.raster}};
  doc["simulation"] = std::move(sim);
  return doc.dump(2) + "\n";
}

bool operator==(const Scene& a, const Scene& b) {
  return serialize_scene(a) == serialize_scene(b);
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  return out;
}

}  // namespace

void write_taps_csv(const std::vector<Tap>& taps, const std::string& path) {
  auto out = open_out(path);
  out << "delay_s,amplitude,order,stratum_dim\n";
  for (const auto& t : taps)
    out << fmt_double(t.delay) << ',' << fmt_double(t.amplitude) << ','
        << t.order << ',' << t.stratum_dim << '\n';
  if (!out) throw IoError("failed while writing " + path);
}

void write_signal_csv(const Signal& signal, const std::string& path) {
  auto out = open_out(path);
  out << "t,value\n";
  for (std::size_t i = 0; i < signal.samples.size(); ++i)
    out << fmt_double(signal.t0 + static_cast<double>(i) / signal.sample_rate)
        << ',' << fmt_double(signal.samples[i]) << '\n';
  if (!out) throw IoError("failed while writing " + path);
}

void write_wav(const Signal& signal, const std::string& path) {
  auto out = open_out(path);
  const std::uint32_t n = static_cast<std::uint32_t>(signal.samples.size());
  const std::uint32_t rate = static_cast<std::uint32_t>(signal.sample_rate);
  const std::uint32_t data_bytes = n * 4;

  auto put16 = [&](std::uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    out.write(b, 2);
  };
  auto put32 = [&](std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff),
                 static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
  };

  out.write("RIFF", 4);
  put32(4 + 26 + 12 + 8 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put32(18);
  put16(3);  // IEEE float
  put16(1);  // mono
  put32(rate);
  put32(rate * 4);
  put16(4);
  put16(32);
  put16(0);  // no extension bytes
  out.write("fact", 4);
  put32(4);
  put32(n);
  out.write("data", 4);
  put32(data_bytes);
  for (double v : signal.samples) {
    float f = static_cast<float>(v);
    static_assert(sizeof(float) == 4);
    out.write(reinterpret_cast<const char*>(&f), 4);
  }
  if (!out) throw IoError("failed while writing " + path);
}

void write_paths_jsonl(const std::vector<WeightedAtom>& atoms,
                       const std::string& path) {
  auto out = open_out(path);
  for (const auto& a : atoms) {
    json j;
    j["order"] = a.order;
    j["stratum_dim"] = a.stratum_dim;
    j["weight"] = a.weight;
    j["position"] = vec_to_json(a.position);
    json pts = json::array();
    json ids = json::array();
    for (const auto& b : a.path.bounces) {
      pts.push_back(vec_to_json(b.point));
      ids.push_back(b.element_id);
    }
    j["points"] = std::move(pts);
    j["elements"] = std::move(ids);
    j["residual"] = a.validity_residual;
    j["visible"] = true;  // only surviving paths are exported
    j["grazing"] = a.grazing;
    j["absorption"] = a.absorption;
    j["directivity"] = a.directivity;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed while writing " + path);
}

OutputPaths write_outputs(const std::vector<Tap>& taps, const Signal& signal,
                          const std::vector<WeightedAtom>& atoms,
                          const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);
  OutputPaths paths;
  paths.taps_csv = out_dir + "/taps.csv";
  paths.rir_csv = out_dir + "/rir.csv";
  paths.rir_wav = out_dir + "/rir.wav";
  paths.paths_jsonl = out_dir + "/paths.jsonl";
  write_taps_csv(taps, paths.taps_csv);
  write_signal_csv(signal, paths.rir_csv);
  write_wav(signal, paths.rir_wav);
  write_paths_jsonl(atoms, paths.paths_jsonl);
  return paths;
}

}  // namespace ism
