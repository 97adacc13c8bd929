#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "egoview/io.hpp"
#include "oracles.hpp"

using namespace egoview;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("egoview_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

template <typename E>
E caught(auto&& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e;
  }
  FAIL("expected throw");
  throw;
}

}  // namespace

TEST_CASE("byte conversion rounds to nearest") {
  CHECK(io::to_byte(0.5) == 128);
  CHECK(io::to_byte(0.0) == 0);
  CHECK(io::to_byte(1.0) == 255);
  CHECK(io::to_byte(-0.2) == 0);
  CHECK(io::to_byte(1.7) == 255);
  CHECK(io::from_byte(128) == 128.0 / 255.0);
  for (int b = 0; b < 256; ++b) CHECK(io::to_byte(io::from_byte(std::uint8_t(b))) == b);
}

TEST_CASE("PNG round trip is exact after quantization") {
  TempDir dir;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RgbImage img(17, 9);
  for (double& v : img.values()) v = u(rng);
  img.set_pixel(0, 0, {0.5, 0.5, 0.5});
  io::save_png(dir / "a.png", img);
  const RgbImage back = io::load_png(dir / "a.png");
  CHECK(back == io::quantize(img));
  CHECK(back.pixel(0, 0) == Eigen::Vector3d::Constant(128.0 / 255.0));
  for (std::size_t i = 0; i < img.values().size(); ++i)
    CHECK(std::abs(back.values()[i] - img.values()[i]) <= 0.5 / 255.0 + 1e-12);
}

TEST_CASE("PNG output is byte-identical across writes") {
  TempDir dir;
  RgbImage img(32, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) img.set_pixel(x, y, {x / 31.0, y / 31.0, 0.25});
  io::save_png(dir / "a.png", img);
  io::save_png(dir / "b.png", img);
  CHECK(io::read_file(dir / "a.png") == io::read_file(dir / "b.png"));
}

TEST_CASE("mask PNG round trip") {
  TempDir dir;
  Mask m(5, 4);
  m.at(1, 2) = 1;
  m.at(4, 3) = 1;
  io::save_mask_png(dir / "m.png", m);
  CHECK(io::load_mask_png(dir / "m.png") == m);
}

TEST_CASE("PFM round trip is bit-exact for float values") {
  TempDir dir;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  DepthMap d(13, 7);
  for (double& v : d.values()) v = static_cast<float>(u(rng));
  d.at(3, 2) = 0.0;
  io::save_pfm(dir / "d.pfm", d);
  const DepthMap back = io::load_pfm(dir / "d.pfm");
  CHECK(back == d);

  const std::string bytes = io::read_file(dir / "d.pfm");
  CHECK(bytes.rfind("Pf\n13 7\n-1", 0) == 0);
}

TEST_CASE("PFM stores rows bottom to top and invalid depths as 0") {
  TempDir dir;
  DepthMap d(1, 2);
  d.at(0, 0) = 1.0;
  d.at(0, 1) = std::numeric_limits<double>::quiet_NaN();
  io::save_pfm(dir / "d.pfm", d);
  const std::string bytes = io::read_file(dir / "d.pfm");
  REQUIRE(bytes.size() >= 8);
  float first = -1.0f;
  float second = -1.0f;
  std::memcpy(&first, bytes.data() + bytes.size() - 8, 4);
  std::memcpy(&second, bytes.data() + bytes.size() - 4, 4);
  CHECK(first == 0.0f);
  CHECK(second == 1.0f);
  const DepthMap back = io::load_pfm(dir / "d.pfm");
  CHECK(back.at(0, 0) == 1.0);
  CHECK(back.at(0, 1) == 0.0);
}

TEST_CASE("PFM: malformed input reports a parse error") {
  TempDir dir;
  io::write_file(dir / "bad.pfm", "PF\n2 2\n-1.0\n");
  CHECK(caught<ParseError>([&] { (void)io::load_pfm(dir / "bad.pfm"); }).offset() == 0);
  io::write_file(dir / "short.pfm", std::string("Pf\n2 2\n-1.0\n") + std::string(8, '\0'));
  CHECK_THROWS_AS((void)io::load_pfm(dir / "short.pfm"), ParseError);
  CHECK(caught<Error>([&] { (void)io::load_pfm(dir / "missing.pfm"); }).code() == ErrorCode::IoError);
}

TEST_CASE("sparse map triple round trip") {
  TempDir dir;
  SparseEgoMap map{RgbImage(4, 3, kInvalidFill), Mask(4, 3), DepthMap(4, 3)};
  map.validity.at(1, 1) = 1;
  map.rgb.set_pixel(1, 1, {1.0, 0.0, 0.2});
  map.depth_buffer.at(1, 1) = 1.25;
  io::save_sparse_map(dir / "out", map);
  const auto paths = io::sparse_map_paths(dir / "out");
  CHECK(paths.rgb.filename() == "out_rgb.png");
  CHECK(paths.mask.filename() == "out_mask.png");
  CHECK(paths.depth.filename() == "out_depth.pfm");
  const SparseEgoMap back = io::load_sparse_map(dir / "out");
  CHECK(back.validity == map.validity);
  CHECK(back.depth_buffer == map.depth_buffer);
  CHECK(back.rgb == io::quantize(map.rgb));

  Mask other(4, 3);
  io::save_mask_png(paths.mask, other);
  CHECK_THROWS_AS((void)io::load_sparse_map(dir / "out"), ValidationError);
}

TEST_CASE("intrinsics, transform and pose documents round trip") {
  TempDir dir;
  const CameraIntrinsics k{512.25, 511.5, 255.5, 254.75, 512, 480};
  io::save_intrinsics(dir / "k.json", k);
  CHECK(io::load_intrinsics(dir / "k.json") == k);

  std::mt19937_64 rng(3);
  const SimilarityTransform t{1.75, oracle::random_rotation(rng), oracle::random_vector(rng, -1, 1)};
  io::save_transform(dir / "t.json", t);
  const SimilarityTransform tb = io::load_transform(dir / "t.json");
  CHECK(tb.scale == t.scale);
  CHECK(tb.rotation == t.rotation);
  CHECK(tb.translation == t.translation);

  const HandPose p(HandLayout::TwoHands42, oracle::random_points(rng, 42, 0.3));
  io::save_pose(dir / "p.json", p);
  const HandPose pb = io::load_pose(dir / "p.json");
  CHECK(pb.layout == p.layout);
  CHECK(pb.keypoints == p.keypoints);
}

TEST_CASE("documents: validation errors name the field") {
  TempDir dir;
  io::write_file(dir / "t.json",
                 R"({"scale": 1, "rotation": [1,0,0, 0,1,0, 0,0.5,1], "translation": [0,0,0]})");
  CHECK_THROWS_AS((void)io::load_transform(dir / "t.json"), ValidationError);

  io::write_file(dir / "k.json", R"({"fx": 1, "fy": 1, "cx": 0, "cy": 0, "width": 4})");
  CHECK(caught<ValidationError>([&] { (void)io::load_intrinsics(dir / "k.json"); }).field() == "height");

  io::write_file(dir / "p.json", R"({"layout": "single_hand_21", "units": "millimeters", "keypoints": []})");
  CHECK(caught<ValidationError>([&] { (void)io::load_pose(dir / "p.json"); }).field() == "units");

  io::write_file(dir / "p2.json", R"({"layout": "single_hand_21", "units": "meters", "keypoints": [[0,0,1]]})");
  CHECK_THROWS_AS((void)io::load_pose(dir / "p2.json"), ValidationError);
}

TEST_CASE("documents: malformed JSON reports the byte offset") {
  TempDir dir;
  io::write_file(dir / "k.json", "{\"fx\": 1,, }");
  const ParseError e = caught<ParseError>([&] { (void)io::load_intrinsics(dir / "k.json"); });
  CHECK(e.offset() == 9);
  CHECK(e.path() == (dir / "k.json").string());
}

TEST_CASE("scene config and style documents fill defaults") {
  TempDir dir;
  io::write_file(dir / "s.json", R"({"width": 64, "ego_eye": [0, -0.5, 0.6]})");
  const SceneConfig c = io::load_scene_config(dir / "s.json");
  CHECK(c.width == 64);
  CHECK(c.height == SceneConfig{}.height);
  CHECK(c.ego_eye == Eigen::Vector3d(0, -0.5, 0.6));

  io::write_file(dir / "st.json", R"({"keypoint_radius": 6, "color_scheme": "monochrome"})");
  const PoseMapStyle st = io::load_pose_map_style(dir / "st.json");
  CHECK(st.keypoint_radius == 6);
  CHECK(st.bone_thickness == PoseMapStyle{}.bone_thickness);
  CHECK(st.color_scheme == PoseColorScheme::Monochrome);

  io::write_file(dir / "bad.json", R"({"width": 64.5})");
  CHECK(caught<ValidationError>([&] { (void)io::load_scene_config(dir / "bad.json"); }).field() == "width");
}

TEST_CASE("manifest: relative paths, optional fields and missing files") {
  TempDir dir;
  fs::create_directories(dir / "data");
  for (const char* f : {"exo.png", "exo.pfm", "exo_pose.json", "ego_pose.json", "ego_k.json", "exo_k.json"})
    io::write_file(dir / "data" / f, "x");
  io::write_file(dir / "m.json", R"({"entries": [{
      "name": "first",
      "exo_image_path": "data/exo.png", "exo_depth_path": "data/exo.pfm",
      "exo_pose_path": "data/exo_pose.json", "ego_pose_path": "data/ego_pose.json",
      "ego_intrinsics_path": "data/ego_k.json", "exo_intrinsics_path": "data/exo_k.json"}]})");
  const io::Manifest m = io::load_manifest(dir / "m.json");
  REQUIRE(m.entries.size() == 1);
  CHECK(m.entries[0].name == "first");
  CHECK(fs::equivalent(m.entries[0].exo_image_path, dir / "data" / "exo.png"));
  CHECK_FALSE(m.entries[0].hand_depth_path);

  io::save_manifest(dir / "copy.json", m);
  const io::Manifest copy = io::load_manifest(dir / "copy.json");
  CHECK(fs::equivalent(copy.entries[0].ego_pose_path, dir / "data" / "ego_pose.json"));

  fs::remove(dir / "data" / "ego_k.json");
  CHECK(caught<ValidationError>([&] { (void)io::load_manifest(dir / "m.json"); }).field() ==
        "entries[0].ego_intrinsics_path");

  io::write_file(dir / "empty.json", R"({"entries": 3})");
  CHECK_THROWS_AS((void)io::load_manifest(dir / "empty.json"), ValidationError);
}
