#include "egoview/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace egoview {

std::size_t count_valid(const DepthMap& depth) {
  const auto values = depth.values();
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), is_valid_depth));
}

std::size_t count_set(const Mask& mask) {
  const auto values = mask.values();
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](std::uint8_t v) { return v != 0; }));
}

RgbImage::RgbImage(int width, int height, const Eigen::Vector3d& fill)
    : width_(width), height_(height) {
  require(width >= 1 && height >= 1, "image dimensions must be positive");
  values_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < values_.size(); i += 3) {
    values_[i] = fill.x();
    values_[i + 1] = fill.y();
    values_[i + 2] = fill.z();
  }
}

void RgbImage::validate() const {
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("rgb", "channel value outside [0, 1]");
  }
}

void CameraIntrinsics::validate() const {
  if (!(std::isfinite(fx) && fx > 0.0)) throw ValidationError("fx", "must be finite and > 0");
  if (!(std::isfinite(fy) && fy > 0.0)) throw ValidationError("fy", "must be finite and > 0");
  if (!std::isfinite(cx)) throw ValidationError("cx", "must be finite");
  if (!std::isfinite(cy)) throw ValidationError("cy", "must be finite");
  if (width < 1) throw ValidationError("width", "must be >= 1");
  if (height < 1) throw ValidationError("height", "must be >= 1");
}

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

void SimilarityTransform::validate(double tolerance) const {
  if (!(std::isfinite(scale) && scale > 0.0)) throw ValidationError("scale", "must be finite and > 0");
  if (!rotation.allFinite()) throw ValidationError("rotation", "non-finite entry");
  if (!translation.allFinite()) throw ValidationError("translation", "non-finite entry");
  const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).norm();
  if (ortho > tolerance) throw ValidationError("rotation", "not orthonormal");
  if (std::abs(rotation.determinant() - 1.0) > tolerance) {
    throw ValidationError("rotation", "determinant is not +1");
  }
}

SimilarityTransform compose(const SimilarityTransform& a, const SimilarityTransform& b) {
  SimilarityTransform out;
  out.scale = a.scale * b.scale;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.scale * (a.rotation * b.translation) + a.translation;
  return out;
}

SimilarityTransform invert_transform(const SimilarityTransform& transform) {
  SimilarityTransform out;
  out.scale = 1.0 / transform.scale;
  out.rotation = transform.rotation.transpose();
  out.translation = -out.scale * (out.rotation * transform.translation);
  return out;
}

double rotation_angle_between(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  const Eigen::Matrix3d delta = a.transpose() * b;
  // acos is badly conditioned near 0; atan2 of (sin, cos) keeps precision.
  const Eigen::Vector3d axis{delta(2, 1) - delta(1, 2), delta(0, 2) - delta(2, 0),
                             delta(1, 0) - delta(0, 1)};
  return std::atan2(0.5 * axis.norm(), 0.5 * (delta.trace() - 1.0));
}

double SparseEgoMap::valid_fraction() const {
  if (validity.empty()) return 0.0;
  return static_cast<double>(valid_count()) / static_cast<double>(validity.size());
}

std::optional<Eigen::Vector2i> project_pixel(const Eigen::Vector3d& p,
                                             const CameraIntrinsics& intrinsics,
                                             double near_plane) {
  if (!(p.z() > near_plane)) return std::nullopt;
  // nearbyint honours the default FE_TONEAREST mode: round half to even.
  const double u = std::nearbyint(intrinsics.fx * p.x() / p.z() + intrinsics.cx);
  const double v = std::nearbyint(intrinsics.fy * p.y() / p.z() + intrinsics.cy);
  constexpr double kLimit = static_cast<double>(std::numeric_limits<int>::max() / 2);
  if (!(std::abs(u) < kLimit && std::abs(v) < kLimit)) return std::nullopt;
  return Eigen::Vector2i{static_cast<int>(u), static_cast<int>(v)};
}

PointCloud unproject(const DepthMap& depth, const RgbImage& color,
                     const CameraIntrinsics& intrinsics) {
  intrinsics.validate();
  require(depth.same_shape(intrinsics.width, intrinsics.height),
          "unproject: depth dimensions do not match intrinsics");
  require(color.same_shape(intrinsics.width, intrinsics.height),
          "unproject: color dimensions do not match intrinsics");

  PointCloud cloud;
  cloud.reserve(count_valid(depth));
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      const double d = depth.at(u, v);
      if (!is_valid_depth(d)) continue;
      const Eigen::Vector3d position{(u - intrinsics.cx) * d / intrinsics.fx,
                                     (v - intrinsics.cy) * d / intrinsics.fy, d};
      cloud.push_back({position, color.pixel(u, v)});
    }
  }
  return cloud;
}

PointCloud apply_transform(const PointCloud& cloud, const SimilarityTransform& transform) {
  PointCloud out;
  out.reserve(cloud.size());
  for (const auto& point : cloud) {
    out.push_back({transform.apply(point.position), point.color});
  }
  return out;
}

SparseEgoMap project_points(const PointCloud& cloud, const CameraIntrinsics& intrinsics,
                            int splat_radius, double near_plane) {
  intrinsics.validate();
  require(splat_radius >= 0, "project_points: splat radius must be non-negative");

  const int w = intrinsics.width;
  const int h = intrinsics.height;
  SparseEgoMap map{RgbImage(w, h, kInvalidFill), Mask(w, h, 0), DepthMap(w, h, 0.0)};
  Grid<double> zbuffer(w, h, std::numeric_limits<double>::infinity());

  // Sequential in point order with a strict comparison, so equal depths keep
  // the lower index.
  for (const auto& point : cloud) {
    const auto pixel = project_pixel(point.position, intrinsics, near_plane);
    if (!pixel) continue;
    const int u = pixel->x();
    const int v = pixel->y();
    if (u < 0 || u >= w || v < 0 || v >= h) continue;

    const double z = point.position.z();
    const int y0 = std::max(0, v - splat_radius);
    const int y1 = std::min(h - 1, v + splat_radius);
    const int x0 = std::max(0, u - splat_radius);
    const int x1 = std::min(w - 1, u + splat_radius);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (z < zbuffer.at(x, y)) {
          zbuffer.at(x, y) = z;
          map.rgb.set_pixel(x, y, point.color);
          map.validity.at(x, y) = 1;
          map.depth_buffer.at(x, y) = z;
        }
      }
    }
  }
  return map;
}

}  // namespace egoview
