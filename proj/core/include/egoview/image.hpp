#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "egoview/error.hpp"

namespace egoview {

/// Row-major 2D grid, one value per pixel. (x, y) = (column, row).
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    require(width >= 1 && height >= 1, "grid dimensions must be positive");
    values_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  T& at(int x, int y) { return values_[index(x, y)]; }
  const T& at(int x, int y) const { return values_[index(x, y)]; }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }

  bool same_shape(int width, int height) const noexcept {
    return width_ == width && height_ == height;
  }
  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return same_shape(other.width(), other.height());
  }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> values_;
};

/// Depth in meters. Entries <= 0 or non-finite are invalid pixels.
using DepthMap = Grid<double>;

/// Boolean grid stored as bytes (0 / 1).
using Mask = Grid<std::uint8_t>;

inline bool is_valid_depth(double d) noexcept { return std::isfinite(d) && d > 0.0; }

std::size_t count_valid(const DepthMap& depth);
std::size_t count_set(const Mask& mask);

/// Interleaved RGB, channel values in [0, 1].
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, const Eigen::Vector3d& fill = Eigen::Vector3d::Zero());

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return values_.empty(); }

  double& at(int x, int y, int c) { return values_[offset(x, y) + c]; }
  double at(int x, int y, int c) const { return values_[offset(x, y) + c]; }

  Eigen::Vector3d pixel(int x, int y) const {
    const std::size_t o = offset(x, y);
    return {values_[o], values_[o + 1], values_[o + 2]};
  }
  void set_pixel(int x, int y, const Eigen::Vector3d& rgb) {
    const std::size_t o = offset(x, y);
    values_[o] = rgb.x();
    values_[o + 1] = rgb.y();
    values_[o + 2] = rgb.z();
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool same_shape(int width, int height) const noexcept {
    return width_ == width && height_ == height;
  }
  bool same_shape(const RgbImage& other) const noexcept {
    return same_shape(other.width_, other.height_);
  }

  /// Throws ValidationError if any channel lies outside [0, 1].
  void validate() const;

  bool operator==(const RgbImage&) const = default;

 private:
  std::size_t offset(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

}  // namespace egoview
