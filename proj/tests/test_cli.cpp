#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include "geodiff/cli/commands.hpp"
#include "geodiff/evalharness/instruction.hpp"
#include "geodiff/featurefield/latent_io.hpp"
#include "geodiff/geodrag/config.hpp"
#include "geodiff/geodrag/trajectory.hpp"
#include "geodiff/scene3d/scene_spec.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace geodiff;

namespace {

const fs::path data_dir = GEODIFF_DATA_DIR;

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "geodiff");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("geodiff_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

std::string blob_suite_json(const std::string& variants) {
  return R"js({"cases":[{"id":"a","spec":{"seed":3,"drags":[[6,0]]}},{"id":"b","spec":{"seed":4,"drags":[[0,5]]}}],)js"
         R"js("variants":)js" + variants + "}";
}

}  // namespace

TEST_CASE("project: reference scene gives source equal to target") {
  const fs::path dir = scratch("project_ref");
  const Run r = invoke({"project", (data_dir / "scenes/boxcar_reference.json").string(), "-o", (dir / "i.json").string()});
  REQUIRE(r.code == 0);
  const auto inst = eval::load_instruction(dir / "i.json");
  REQUIRE(inst.pairs.size() == 6);
  for (const auto& p : inst.pairs) {
    CHECK(p.source.x == p.target.x);
    CHECK(p.source.y == p.target.y);
  }
}

TEST_CASE("project: box-car length edit matches the matrix chain") {
  const fs::path dir = scratch("project_boxcar");
  const fs::path scene_path = data_dir / "scenes/boxcar_length.json";
  const Run r = invoke({"project", scene_path.string(), "-o", (dir / "i.json").string(), "--wireframe",
                     (dir / "w.pgm").string()});
  REQUIRE(r.code == 0);
  CHECK(fs::file_size(dir / "w.pgm") > 512 * 512);
  const auto inst = eval::load_instruction(dir / "i.json");
  CHECK(inst.latent_width == 64);
  const scene::Scene scene = scene::load_scene(scene_path);
  const auto chain = oracle::camera_chain(scene.camera.r, scene.camera.theta_deg, scene.camera.phi_deg,
                                          scene.camera.focal_px, scene.camera.cx, scene.camera.cy);
  REQUIRE(inst.pairs.size() == scene.object.keypoints.size());
  for (std::size_t i = 0; i < inst.pairs.size(); ++i) {
    const auto& kp = scene.object.keypoints[i];
    CHECK(inst.pairs[i].name == kp.name);
    const double dx = kp.name == "front" ? 1.0 : 0.0;
    const auto s = oracle::project(chain, kp.position.x(), kp.position.y(), kp.position.z());
    const auto t = oracle::project(chain, kp.position.x() + dx, kp.position.y(), kp.position.z());
    CHECK(std::abs(inst.pairs[i].source.x - double(s[0])) <= 1e-6);
    CHECK(std::abs(inst.pairs[i].source.y - double(s[1])) <= 1e-6);
    CHECK(std::abs(inst.pairs[i].target.x - double(t[0])) <= 1e-6);
    CHECK(std::abs(inst.pairs[i].target.y - double(t[1])) <= 1e-6);
  }
}

TEST_CASE("project: missing mesh is an input error naming the path") {
  const fs::path dir = scratch("project_missing");
  write(dir / "scene.json",
        R"js({"mesh_path":"nowhere.obj","camera":{"r":6,"theta_deg":20,"phi_deg":30,"focal_px":512,"width":512,"height":512}})js");
  const Run r = invoke({"project", (dir / "scene.json").string(), "-o", (dir / "i.json").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("nowhere.obj") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "i.json"));
}

TEST_CASE("drag: identity instruction leaves the latent bit-identical") {
  const fs::path dir = scratch("drag_identity");
  auto inst = eval::load_instruction(data_dir / "blob_case/instruction.json");
  for (auto& p : inst.pairs) p.target = p.source;
  eval::save_instruction(dir / "i.json", inst);
  const Run r = invoke({"drag", (data_dir / "blob_case/latent.lat").string(), (dir / "i.json").string(), "-o",
                     (dir / "out").string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "out/final.lat") == slurp(data_dir / "blob_case/latent.lat"));
  CHECK(read_json(dir / "out/summary.json")["md_after"] == 0.0);
}

TEST_CASE("drag: corrupt latent header is an input error") {
  const fs::path dir = scratch("drag_corrupt");
  write(dir / "bad.lat", "{\"height\":4,\"width\":\n garbage");
  const Run r = invoke({"drag", (dir / "bad.lat").string(), (data_dir / "blob_case/instruction.json").string(), "-o",
                     (dir / "out").string()});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  CHECK_FALSE(fs::exists(dir / "out/final.lat"));
}

TEST_CASE("drag: out-of-bounds target exits 3 and still writes the log") {
  const fs::path dir = scratch("drag_oob");
  nlohmann::json inst = read_json(data_dir / "blob_case/instruction.json");
  inst["pairs"][0]["target"] = {90.0, 35.0};
  write(dir / "i.json", inst.dump());
  const Run r = invoke({"drag", (data_dir / "blob_case/latent.lat").string(), (dir / "i.json").string(), "-o",
                     (dir / "out").string()});
  CHECK(r.code == 3);
  CHECK(fs::exists(dir / "out/trajectory.jsonl"));
  CHECK_FALSE(fs::exists(dir / "out/final.lat"));
}

TEST_CASE("drag: shipped blob case reaches its target, plot endpoint agrees") {
  const fs::path dir = scratch("drag_blob");
  const Run r = invoke({"drag", (data_dir / "blob_case/latent.lat").string(),
                     (data_dir / "blob_case/instruction.json").string(), "-o", (dir / "out").string(), "--config",
                     (data_dir / "config/default.json").string()});
  REQUIRE(r.code == 0);
  const auto summary = read_json(dir / "out/summary.json");
  CHECK(summary["md_after"].get<double>() <= 3.0);
  CHECK(summary["md_before"].get<double>() == 20.0);

  const Run p = invoke({"plot", (dir / "out/trajectory.jsonl").string(), "-o", (dir / "t.svg").string()});
  REQUIRE(p.code == 0);
  std::ifstream log(dir / "out/trajectory.jsonl");
  const auto records = drag::read_trajectory(log);
  const drag::TrajectoryRecord* last = nullptr;
  for (const auto& rec : records)
    if (rec.point_id == 0 && rec.x && rec.event.empty()) last = &rec;
  REQUIRE(last != nullptr);
  CHECK(std::hypot(*last->x - 39.0, *last->y - 35.0) <= 3.0);
  CHECK(slurp(dir / "t.svg").find(R"(class="target" cx=)") != std::string::npos);
}

TEST_CASE("drag: config file and overrides") {
  const fs::path dir = scratch("drag_config");
  const auto base = cli::resolve_config({data_dir / "config/default.json", {}, std::nullopt});
  CHECK(base.hash() == drag::DragConfig{}.hash());
  const auto over = cli::resolve_config({{}, {"r2=9", "lambda=0.5"}, 42});
  CHECK(over.r2 == 9);
  CHECK(over.lambda == 0.5);
  CHECK(over.seed == 42);
  const Run bad = invoke({"drag", (data_dir / "blob_case/latent.lat").string(),
                       (data_dir / "blob_case/instruction.json").string(), "-o", (dir / "out").string(), "--set",
                       "no_such_key=1"});
  CHECK(bad.code == 2);
}

TEST_CASE("bench: empty variants mean full only, aggregates consistent") {
  const fs::path dir = scratch("bench_empty");
  write(dir / "suite.json", blob_suite_json("[]"));
  const Run r = invoke({"bench", (dir / "suite.json").string(), "-o", (dir / "r.json").string(), "--no-wall-time"});
  REQUIRE(r.code == 0);
  const auto report = read_json(dir / "r.json");
  REQUIRE(report["cases"].size() == 2);
  for (const auto& row : report["cases"]) {
    CHECK(row["variant"] == "full");
    CHECK_FALSE(row.contains("wall_time_s"));
  }
  REQUIRE(report["aggregate"].size() == 1);
  const double a = report["cases"][0]["md_after"], b = report["cases"][1]["md_after"];
  CHECK(report["aggregate"][0]["mean_md"].get<double>() == doctest::Approx((a + b) / 2));
}

TEST_CASE("bench: duplicate case ids are an input error") {
  const fs::path dir = scratch("bench_dup");
  write(dir / "suite.json",
        R"js({"cases":[{"id":"a","spec":{"seed":3}},{"id":"a","spec":{"seed":4}}]})js");
  const Run r = invoke({"bench", (dir / "suite.json").string(), "-o", (dir / "r.json").string()});
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(dir / "r.json"));
}

TEST_CASE("plot: hand-written logs") {
  const fs::path dir = scratch("plot");
  SUBCASE("one stationary point") {
    write(dir / "a.jsonl",
          R"({"timestep":0,"iteration":0,"point_id":0,"x":5.0,"y":5.0,"e":0.0,"fixated":true,"loss":null,"event":null,"tx":5.0,"ty":5.0})"
          "\n");
    REQUIRE(invoke({"plot", (dir / "a.jsonl").string(), "-o", (dir / "a.svg").string()}).code == 0);
    const std::string svg = slurp(dir / "a.svg");
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find(R"(class="target")") != std::string::npos);
  }
  SUBCASE("two points") {
    std::string log;
    for (int id = 0; id < 2; ++id)
      for (int it = 0; it < 3; ++it)
        log += R"({"timestep":0,"iteration":)" + std::to_string(it) + R"(,"point_id":)" + std::to_string(id) +
               R"(,"x":)" + std::to_string(10 + it) + R"(,"y":)" + std::to_string(10 * id) +
               R"(,"e":1.0,"fixated":false,"loss":null,"event":null,"tx":20.0,"ty":)" + std::to_string(10 * id) +
               "}\n";
    write(dir / "b.jsonl", log);
    REQUIRE(invoke({"plot", (dir / "b.jsonl").string(), "-o", (dir / "b.svg").string()}).code == 0);
    const std::string svg = slurp(dir / "b.svg");
    auto count = [&](const std::string& needle) {
      int n = 0;
      for (auto pos = svg.find(needle); pos != std::string::npos; pos = svg.find(needle, pos + 1)) ++n;
      return n;
    };
    CHECK(count("<polyline") == 2);
    CHECK(count(R"(class="target")") == 2);
  }
  SUBCASE("malformed line reports its number") {
    write(dir / "c.jsonl",
          R"({"timestep":0,"iteration":0,"point_id":0,"x":5.0,"y":5.0,"e":0.0,"fixated":true,"loss":null,"event":null,"tx":5.0,"ty":5.0})"
          "\n{not json\n");
    const Run r = invoke({"plot", (dir / "c.jsonl").string(), "-o", (dir / "c.svg").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 2") != std::string::npos);
  }
}

TEST_CASE("help lists every config key on every subcommand") {
  for (const std::string sub : {"project", "drag", "bench", "plot", "synth"}) {
    CAPTURE(sub);
    const Run r = invoke({sub, "--help"});
    CHECK(r.code == 0);
    for (const auto& k : drag::config_keys()) CHECK(r.out.find("  " + k.key + " = ") != std::string::npos);
  }
}

TEST_CASE("outputs are byte-identical across repeated runs") {
  const fs::path dir = scratch("idempotent");
  write(dir / "suite.json", blob_suite_json(R"(["full","no_fixation"])"));
  for (int i = 0; i < 2; ++i) {
    const std::string k = std::to_string(i);
    REQUIRE(invoke({"drag", (data_dir / "blob_case/latent.lat").string(),
                 (data_dir / "blob_case/instruction.json").string(), "-o", (dir / ("d" + k)).string()})
                .code == 0);
    REQUIRE(invoke({"bench", (dir / "suite.json").string(), "-o", (dir / ("r" + k + ".json")).string(),
                 "--no-wall-time", "--workers", "2"})
                .code == 0);
    REQUIRE(invoke({"synth", "--suite", "2", "--seed", "5", "-o", (dir / ("s" + k)).string()}).code == 0);
    REQUIRE(invoke({"plot", (dir / ("d" + k) / "trajectory.jsonl").string(), "-o", (dir / ("p" + k + ".svg")).string()})
                .code == 0);
  }
  for (const char* f : {"final.lat", "trajectory.jsonl", "summary.json"})
    CHECK(slurp(dir / "d0" / f) == slurp(dir / "d1" / f));
  CHECK(slurp(dir / "r0.json") == slurp(dir / "r1.json"));
  CHECK(slurp(dir / "s0/suite.json") == slurp(dir / "s1/suite.json"));
  CHECK(slurp(dir / "p0.svg") == slurp(dir / "p1.svg"));
}

TEST_CASE("installed binary runs end to end") {
  const std::string exe = GEODIFF_CLI_PATH;
  const fs::path dir = scratch("binary");
  const std::string cmd = "\"" + exe + "\" synth -o \"" + (dir / "c").string() + "\" > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "c/latent.lat"));
  const std::string bad = "\"" + exe + "\" drag \"" + (dir / "missing.lat").string() + "\" x.json -o \"" +
                          (dir / "o").string() + "\" 2> /dev/null";
  const int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
