#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "egoview/image.hpp"

namespace egoview {

/// Pinhole intrinsics. Integer pixel indices denote pixel centers.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  /// Throws ValidationError naming the first offending field.
  void validate() const;

  Eigen::Matrix3d matrix() const;

  bool operator==(const CameraIntrinsics&) const = default;
};

struct ColoredPoint {
  Eigen::Vector3d position;
  Eigen::Vector3d color;
};

using PointCloud = std::vector<ColoredPoint>;

/// p -> scale * rotation * p + translation.
struct SimilarityTransform {
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static SimilarityTransform identity() { return {}; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return scale * (rotation * p) + translation;
  }

  /// Throws ValidationError unless the rotation is proper and orthonormal
  /// within `tolerance` and the scale is positive.
  void validate(double tolerance = 1e-9) const;
};

/// (a * b)(p) = a(b(p)).
SimilarityTransform compose(const SimilarityTransform& a, const SimilarityTransform& b);

/// Returns (1/s, R^T, -(1/s) R^T t).
SimilarityTransform invert_transform(const SimilarityTransform& transform);

/// Rotation angle of R_a^T R_b in radians.
double rotation_angle_between(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

/// Sparse image produced by splatting a point cloud. `validity` is
/// authoritative; `rgb` holds `fill` where it is false.
struct SparseEgoMap {
  RgbImage rgb;
  Mask validity;
  DepthMap depth_buffer;

  std::size_t valid_count() const { return count_set(validity); }
  double valid_fraction() const;
};

inline constexpr double kNearPlane = 1e-6;
inline constexpr int kDefaultSplatRadius = 1;
inline const Eigen::Vector3d kInvalidFill{0.5, 0.5, 0.5};

/// Pixel index under the round-half-to-even convention, or nullopt when
/// the point is behind the near plane. Bounds are not checked.
std::optional<Eigen::Vector2i> project_pixel(const Eigen::Vector3d& p,
                                             const CameraIntrinsics& intrinsics,
                                             double near_plane = kNearPlane);

/// One point per valid depth pixel, row-major order.
PointCloud unproject(const DepthMap& depth, const RgbImage& color,
                     const CameraIntrinsics& intrinsics);

PointCloud apply_transform(const PointCloud& cloud, const SimilarityTransform& transform);

/// Z-buffered splatting. Each point landing inside the image paints a
/// (2r+1)^2 neighborhood; per pixel the smallest depth wins, ties go to the
/// lower point index.
SparseEgoMap project_points(const PointCloud& cloud, const CameraIntrinsics& intrinsics,
                            int splat_radius = kDefaultSplatRadius,
                            double near_plane = kNearPlane);

}  // namespace egoview
