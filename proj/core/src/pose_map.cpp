#include "egoview/pose_map.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace egoview {
namespace {

constexpr std::array<double, 5> kFingerHues = {0.0, 60.0, 120.0, 190.0, 300.0};

Eigen::Vector3d hsv_to_rgb(double hue, double saturation, double value) {
  const double c = value * saturation;
  const double h = std::fmod(hue, 360.0) / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(h, 2.0) - 1.0));
  Eigen::Vector3d rgb;
  if (h < 1) rgb = {c, x, 0};
  else if (h < 2) rgb = {x, c, 0};
  else if (h < 3) rgb = {0, c, x};
  else if (h < 4) rgb = {0, x, c};
  else if (h < 5) rgb = {x, 0, c};
  else rgb = {c, 0, x};
  return rgb + Eigen::Vector3d::Constant(value - c);
}

// Squared distance from a pixel center to the segment a-b.
double segment_distance_sq(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                           const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len_sq = ab.squaredNorm();
  double t = len_sq > 0.0 ? (p - a).dot(ab) / len_sq : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).squaredNorm();
}

void paint_segment(RgbImage& image, const Eigen::Vector2i& a, const Eigen::Vector2i& b,
                   double half_width, const Eigen::Vector3d& color) {
  const int pad = static_cast<int>(std::ceil(half_width));
  const int x0 = std::max(0, std::min(a.x(), b.x()) - pad);
  const int x1 = std::min(image.width() - 1, std::max(a.x(), b.x()) + pad);
  const int y0 = std::max(0, std::min(a.y(), b.y()) - pad);
  const int y1 = std::min(image.height() - 1, std::max(a.y(), b.y()) + pad);
  const Eigen::Vector2d ad = a.cast<double>();
  const Eigen::Vector2d bd = b.cast<double>();
  const double limit = half_width * half_width;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (segment_distance_sq({double(x), double(y)}, ad, bd) <= limit) {
        image.set_pixel(x, y, color);
      }
    }
  }
}

}  // namespace

std::string_view to_string(PoseColorScheme scheme) {
  return scheme == PoseColorScheme::FingerHue ? "finger_hue" : "monochrome";
}

PoseColorScheme pose_color_scheme_from_string(std::string_view name) {
  if (name == "finger_hue") return PoseColorScheme::FingerHue;
  if (name == "monochrome") return PoseColorScheme::Monochrome;
  throw ValidationError("color_scheme", "unknown scheme '" + std::string(name) + "'");
}

void PoseMapStyle::validate() const {
  if (keypoint_radius < 1) throw ValidationError("keypoint_radius", "must be >= 1");
  if (bone_thickness < 1) throw ValidationError("bone_thickness", "must be >= 1");
  if (!(background.minCoeff() >= 0.0 && background.maxCoeff() <= 1.0)) {
    throw ValidationError("background", "channels must lie in [0, 1]");
  }
}

int finger_of_joint(int joint_in_hand) {
  return joint_in_hand == 0 ? 0 : (joint_in_hand - 1) / 4 + 1;
}

Eigen::Vector3d pose_map_color(PoseColorScheme scheme, int hand, int finger) {
  if (scheme == PoseColorScheme::Monochrome) return Eigen::Vector3d::Ones();
  const double value = hand == 0 ? 1.0 : 0.6;
  if (finger == 0) return Eigen::Vector3d::Constant(hand == 0 ? 1.0 : 0.75);
  return hsv_to_rgb(kFingerHues[static_cast<std::size_t>(finger - 1)], 1.0, value);
}

RgbImage rasterize_pose_map(const HandPose& pose, const CameraIntrinsics& intrinsics,
                            const PoseMapStyle& style) {
  intrinsics.validate();
  style.validate();
  pose.validate();

  RgbImage image(intrinsics.width, intrinsics.height, style.background);
  std::vector<std::optional<Eigen::Vector2i>> pixels;
  pixels.reserve(static_cast<std::size_t>(pose.size()));
  for (int i = 0; i < pose.size(); ++i) pixels.push_back(project_pixel(pose.point(i), intrinsics));

  const int hands = pose.size() / 21;
  const double half_width = 0.5 * style.bone_thickness;
  for (int hand = 0; hand < hands; ++hand) {
    for (const auto& [from, to] : kHandBones) {
      const auto& a = pixels[static_cast<std::size_t>(hand * 21 + from)];
      const auto& b = pixels[static_cast<std::size_t>(hand * 21 + to)];
      if (!a || !b) continue;
      paint_segment(image, *a, *b, half_width,
                    pose_map_color(style.color_scheme, hand, finger_of_joint(to)));
    }
  }
  for (int hand = 0; hand < hands; ++hand) {
    for (int joint = 0; joint < 21; ++joint) {
      const auto& center = pixels[static_cast<std::size_t>(hand * 21 + joint)];
      if (!center) continue;
      paint_segment(image, *center, *center, style.keypoint_radius,
                    pose_map_color(style.color_scheme, hand, finger_of_joint(joint)));
    }
  }
  return image;
}

}  // namespace egoview
