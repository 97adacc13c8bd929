#pragma once

#include <cstdint>

#include "egoview/alignment.hpp"
#include "egoview/geometry.hpp"

namespace egoview {

/// Knobs for the synthetic tabletop generator. Lengths in meters, focal
/// lengths in pixels. World frame is z-up with the table top at z = 0.
struct SceneConfig {
  int width = 512;
  int height = 512;
  double exo_focal = 560.0;
  double ego_focal = 420.0;
  double surfel_spacing = 0.003;
  double table_half_width = 0.7;   ///< x extent of table and wall
  double table_near = -0.45;       ///< y of the table's near edge
  double wall_y = 0.75;            ///< table far edge and wall position
  double wall_height = 0.7;
  double joint_radius = 0.009;     ///< hand keypoints are drawn as small spheres
  double camera_jitter = 0.03;     ///< uniform jitter on camera centers
  double texture_amplitude = 0.06;       ///< per-channel texture swing around the base color
  double texture_min_wavelength = 0.8;   ///< wavelengths are drawn from [min, 2 min]
  Eigen::Vector3d ego_eye{0.0, -0.38, 0.52};
  Eigen::Vector3d exo_eye{0.42, -0.62, 0.62};
  Eigen::Vector3d look_at{0.0, 0.12, 0.05};

  void validate() const;
};

struct SceneCamera {
  CameraIntrinsics intrinsics;
  SimilarityTransform pose;  ///< world -> camera, scale exactly 1
};

struct SyntheticScene {
  PointCloud surfels;        ///< scene geometry; hand surfels are listed last
  std::size_t hand_surfel_begin = 0;
  KeypointMatrix hand_keypoints_world;  ///< 42 x 3, two hands
  SceneCamera exo_camera;
  SceneCamera ego_camera;
  double depth_ambiguity = 1.0;  ///< relative exo depth = metric depth / this
  std::uint64_t seed = 0;
};

enum class SceneView { Exo, Ego };

/// Deterministic in (seed, config): table and back wall planes with smooth
/// seeded textures, one box, two hands of 21 joints each, and two cameras
/// looking at the hands.
SyntheticScene make_scene(std::uint64_t seed, const SceneConfig& config = {});

struct OracleRender {
  RgbImage image;
  DepthMap depth;  ///< camera-frame z, 0 where nothing landed
};

/// Direct z-buffered rasterization of the surfels (splat radius 1, nearest
/// wins, ties to lower index). Written independently of project_points.
OracleRender oracle_render(const SyntheticScene& scene, SceneView which);

/// Depth of the hand surfels alone, as seen from the selected camera.
DepthMap render_hand_depth(const SyntheticScene& scene, SceneView which);

/// ego_pose * inverse(exo_pose): exocentric camera frame -> egocentric camera frame.
SimilarityTransform ground_truth_transform(const SyntheticScene& scene);

/// Hand keypoints expressed in the selected camera frame.
HandPose scene_hand_pose(const SyntheticScene& scene, SceneView which);

/// Rigid world -> camera pose looking from `eye` at `target` (camera x right,
/// y down, z forward; world z up).
SimilarityTransform look_at_pose(const Eigen::Vector3d& eye, const Eigen::Vector3d& target);

/// Set where a pixel sits on an occlusion edge: its 3x3 neighborhood in the
/// reference depth spans more than `max_span` meters or touches an invalid
/// pixel. End-to-end comparisons skip these pixels.
Mask occlusion_edge_mask(const DepthMap& reference_depth, double max_span = 0.05);

}  // namespace egoview
