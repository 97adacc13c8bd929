#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "egoview/alignment.hpp"
#include "egoview/geometry.hpp"
#include "egoview/pose_map.hpp"
#include "egoview/synthetic.hpp"

namespace egoview::io {

namespace fs = std::filesystem;

// --- images --------------------------------------------------------------

/// [0, 1] -> 0..255 by round(x * 255), clamped.
std::uint8_t to_byte(double value);
inline double from_byte(std::uint8_t value) { return value / 255.0; }

/// Quantizes every channel through the 8-bit round trip.
RgbImage quantize(const RgbImage& image);

/// 8-bit RGB PNG, zlib level 6, no timestamp chunks. Output is a pure
/// function of the pixel bytes.
void save_png(const fs::path& path, const RgbImage& image);
RgbImage load_png(const fs::path& path);

/// 8-bit grayscale PNG, 0 / 255.
void save_mask_png(const fs::path& path, const Mask& mask);
Mask load_mask_png(const fs::path& path);

/// Single-channel little-endian PFM ("Pf", scale -1.0), rows stored bottom
/// to top. Invalid depths are written as 0. Lossless for values that are
/// exactly representable as float.
void save_pfm(const fs::path& path, const DepthMap& depth);
DepthMap load_pfm(const fs::path& path);

/// `<prefix>_rgb.png`, `<prefix>_mask.png`, `<prefix>_depth.pfm`.
struct SparseMapPaths {
  fs::path rgb;
  fs::path mask;
  fs::path depth;
};
SparseMapPaths sparse_map_paths(const fs::path& prefix);
void save_sparse_map(const fs::path& prefix, const SparseEgoMap& map);
SparseEgoMap load_sparse_map(const fs::path& prefix);

// --- structured documents (JSON) -------------------------------------------

void save_intrinsics(const fs::path& path, const CameraIntrinsics& intrinsics);
CameraIntrinsics load_intrinsics(const fs::path& path);

void save_transform(const fs::path& path, const SimilarityTransform& transform);
SimilarityTransform load_transform(const fs::path& path);

void save_pose(const fs::path& path, const HandPose& pose);
HandPose load_pose(const fs::path& path);

/// Every field optional; missing fields keep their defaults.
SceneConfig load_scene_config(const fs::path& path);
PoseMapStyle load_pose_map_style(const fs::path& path);

std::string serialize_transform(const SimilarityTransform& transform);
SimilarityTransform parse_transform(const std::string& text, const std::string& origin);

// --- manifest ----------------------------------------------------------------

struct ManifestEntry {
  std::string name;
  fs::path exo_image_path;
  fs::path exo_depth_path;
  fs::path exo_pose_path;
  fs::path ego_pose_path;
  fs::path ego_intrinsics_path;
  fs::path exo_intrinsics_path;
  std::optional<fs::path> hand_depth_path;
  std::optional<fs::path> ego_gt_image_path;
  std::optional<fs::path> ego_gt_depth_path;
};

struct Manifest {
  fs::path directory;
  std::vector<ManifestEntry> entries;
};

/// Paths resolve relative to the manifest's directory; every referenced file
/// must exist.
Manifest load_manifest(const fs::path& path);
void save_manifest(const fs::path& path, const Manifest& manifest);

/// Whole-file binary write / read. Throw IoError on failure.
void write_file(const fs::path& path, const std::string& bytes);
std::string read_file(const fs::path& path);

}  // namespace egoview::io
