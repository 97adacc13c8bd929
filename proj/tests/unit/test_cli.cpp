#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "egoview/io.hpp"
#include "oracles.hpp"

using namespace egoview;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("egoview_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
  json out_json() const { return json::parse(out); }
  json err_json() const { return json::parse(err); }
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kSmallScene = R"({"width": 64, "height": 64, "exo_focal": 70, "ego_focal": 52,
                              "surfel_spacing": 0.02, "joint_radius": 0.012})";

}  // namespace

TEST_CASE("cli: align on identical poses") {
  TempDir dir;
  std::mt19937_64 rng(1);
  io::save_pose(dir / "p.json", HandPose(HandLayout::TwoHands42, oracle::random_points(rng, 42, 0.2)));
  const Outcome r = run({"align", "--src-pose", dir / "p.json", "--dst-pose", dir / "p.json",
                         "--out", dir / "t.json"});
  REQUIRE(r.code == 0);
  CHECK(r.out_json()["residual"].get<double>() < 1e-12);
  const SimilarityTransform t = io::load_transform(dir / "t.json");
  CHECK(std::abs(t.scale - 1.0) < 1e-12);
}

TEST_CASE("cli: metrics on identical images") {
  TempDir dir;
  RgbImage img(32, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) img.set_pixel(x, y, {x / 31.0, 0.5, y / 31.0});
  io::save_png(dir / "a.png", img);
  const Outcome r = run({"metrics", "--pred", dir / "a.png", "--gt", dir / "a.png"});
  REQUIRE(r.code == 0);
  CHECK(r.out_json()["psnr"] == "inf");
  CHECK(r.out_json()["ssim"].get<double>() == 1.0);
}

TEST_CASE("cli: errors are one JSON line on stderr") {
  TempDir dir;
  const Outcome missing = run({"metrics", "--pred", dir / "nope.png", "--gt", dir / "nope.png"});
  CHECK(missing.code == 1);
  CHECK(missing.out.empty());
  CHECK(missing.err_json()["error"] == "IoError");
  CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);

  const Outcome usage = run({"align", "--src-pose"});
  CHECK(usage.code == 2);
  CHECK(usage.err_json().contains("error"));

  const Outcome unknown = run({"frobnicate"});
  CHECK(unknown.code == 2);

  io::write_file(dir / "bad.json", "{\"layout\": ");
  const Outcome parse = run({"align", "--src-pose", dir / "bad.json", "--dst-pose", dir / "bad.json"});
  CHECK(parse.code == 1);
  CHECK(parse.err_json()["error"] == "ParseError");
}

TEST_CASE("cli: calibrate recovers the ambiguity of a synthetic scene") {
  TempDir dir;
  io::write_file(dir / "scene.json", kSmallScene);
  const Outcome s = run({"synth", "--seed", "3", "--out", dir / "s", "--config", dir / "scene.json"});
  REQUIRE(s.code == 0);
  const Outcome c = run({"calibrate", "--hand-depth", dir / "s/hand_depth.pfm", "--est-depth",
                         dir / "s/exo_depth.pfm", "--delta", "0", "--out", dir / "metric.pfm"});
  REQUIRE(c.code == 0);
  const double scale = c.out_json()["scale"].get<double>();
  CHECK(scale > 0.5);
  CHECK(scale < 2.0);
  CHECK(c.out_json()["samples"].get<int>() > 0);
  CHECK(fs::exists(dir / "metric.pfm"));
}

TEST_CASE("cli: synth, reproject, posemap and run-manifest") {
  TempDir dir;
  io::write_file(dir / "scene.json", kSmallScene);
  REQUIRE(run({"synth", "--seed", "1", "--out", dir / "s", "--config", dir / "scene.json"}).code == 0);
  for (const char* f : {"exo_rgb.png", "exo_depth.pfm", "hand_depth.pfm", "exo_pose.json", "ego_pose.json",
                        "exo_intrinsics.json", "ego_intrinsics.json", "ego_gt_rgb.png", "manifest.json"}) {
    CHECK(fs::exists(dir / (std::string("s/") + f)));
  }

  const Outcome r = run({"reproject", "--manifest", dir / "s/manifest.json", "--out", dir / "r/map"});
  REQUIRE(r.code == 0);
  const SparseEgoMap map = io::load_sparse_map(dir / "r/map");
  CHECK(map.valid_count() > 0);
  CHECK(fs::exists(dir / "r/map_transform.json"));

  const Outcome explicit_paths = run(
      {"reproject", "--exo-image", dir / "s/exo_rgb.png", "--exo-depth", dir / "s/exo_depth.pfm",
       "--exo-intrinsics", dir / "s/exo_intrinsics.json", "--exo-pose", dir / "s/exo_pose.json",
       "--ego-pose", dir / "s/ego_pose.json", "--ego-intrinsics", dir / "s/ego_intrinsics.json",
       "--hand-depth", dir / "s/hand_depth.pfm", "--out", dir / "r/map2"});
  REQUIRE(explicit_paths.code == 0);
  CHECK(io::read_file(dir / "r/map_rgb.png") == io::read_file(dir / "r/map2_rgb.png"));

  const Outcome incomplete = run({"reproject", "--exo-image", dir / "s/exo_rgb.png", "--out", dir / "r/x"});
  CHECK(incomplete.code == 2);

  const Outcome pm = run({"posemap", "--pose", dir / "s/ego_pose.json", "--intrinsics",
                          dir / "s/ego_intrinsics.json", "--out", dir / "pose.png"});
  REQUIRE(pm.code == 0);
  CHECK(io::load_png(dir / "pose.png").width() == 64);

  const Outcome rm = run({"run-manifest", "--manifest", dir / "s/manifest.json", "--out", dir / "rm"});
  REQUIRE(rm.code == 0);
  const std::string report = io::read_file(dir / "rm/report.csv");
  CHECK(report.rfind(std::string(cli::kReportSchema) + "\nentry,valid_pixel_fraction,psnr,ssim\nseed1,", 0) == 0);
}

TEST_CASE("cli: output directory from the environment") {
  TempDir dir;
  std::mt19937_64 rng(2);
  io::save_pose(dir / "p.json", HandPose(HandLayout::SingleHand21, oracle::random_points(rng, 21, 0.2)));
  setenv(cli::kOutputDirEnv, dir.path.c_str(), 1);
  const Outcome r = run({"align", "--src-pose", dir / "p.json", "--dst-pose", dir / "p.json", "--out", "rel.json"});
  unsetenv(cli::kOutputDirEnv);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "rel.json"));
}

TEST_CASE("cli: diffuse-demo reconstructs the target latent") {
  TempDir dir;
  const Outcome r = run({"diffuse-demo", "--seed", "2", "--steps", "20", "--out", dir / "d"});
  REQUIRE(r.code == 0);
  CHECK(r.out_json()["max_abs_latent_error"].get<double>() < 1e-6);
  CHECK(fs::exists(dir / "d/diffuse_after.png"));
}
