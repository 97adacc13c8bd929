#pragma once

#include <array>
#include <string_view>
#include <utility>

#include <Eigen/Core>

#include "egoview/alignment.hpp"
#include "egoview/geometry.hpp"

namespace egoview {

enum class PoseColorScheme {
  /// Thumb red, index yellow, middle green, ring cyan-blue, pinky magenta;
  /// wrist white. The second hand uses the same hues at 60% value and a
  /// light-gray wrist.
  FingerHue,
  /// Every primitive white.
  Monochrome,
};

std::string_view to_string(PoseColorScheme scheme);
PoseColorScheme pose_color_scheme_from_string(std::string_view name);

struct PoseMapStyle {
  int keypoint_radius = 4;
  int bone_thickness = 3;
  PoseColorScheme color_scheme = PoseColorScheme::FingerHue;
  Eigen::Vector3d background = Eigen::Vector3d::Zero();

  void validate() const;
};

/// Standard 21-joint hand tree: wrist (0) to each finger chain of four
/// joints, thumb 1-4 through pinky 17-20.
inline constexpr std::array<std::pair<int, int>, 20> kHandBones = {{
    {0, 1},  {1, 2},   {2, 3},   {3, 4},    // thumb
    {0, 5},  {5, 6},   {6, 7},   {7, 8},    // index
    {0, 9},  {9, 10},  {10, 11}, {11, 12},  // middle
    {0, 13}, {13, 14}, {14, 15}, {15, 16},  // ring
    {0, 17}, {17, 18}, {18, 19}, {19, 20},  // pinky
}};

/// 0 = wrist, 1..5 = thumb..pinky.
int finger_of_joint(int joint_in_hand);

Eigen::Vector3d pose_map_color(PoseColorScheme scheme, int hand, int finger);

/// Projects each keypoint with the geometry projection rule and draws
/// bones (pixels within bone_thickness / 2 of the segment) then joints
/// (pixels within keypoint_radius of the center). Keypoints at or behind the
/// near plane, and bones touching them, are skipped.
RgbImage rasterize_pose_map(const HandPose& pose, const CameraIntrinsics& intrinsics,
                            const PoseMapStyle& style = {});

}  // namespace egoview
