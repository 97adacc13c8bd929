#pragma once

#include "egoview/image.hpp"

namespace egoview {

struct SsimParams {
  int window_size = 11;
  double gaussian_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;

  void validate() const;
};

/// Mean over pixels and channels of the squared difference.
double mse(const RgbImage& a, const RgbImage& b);

/// MSE restricted to pixels where `mask` is set. Throws EmptyRegion when the
/// mask is empty.
double masked_mse(const RgbImage& a, const RgbImage& b, const Mask& mask);

/// 10 log10(max^2 / mse); +infinity when mse is 0.
double psnr_from_mse(double mse_value, double max_value = 1.0);
double psnr(const RgbImage& a, const RgbImage& b, double max_value = 1.0);

/// Per-channel mean of the Gaussian-windowed SSIM map over the valid
/// (unpadded) region, averaged over channels.
double ssim(const RgbImage& a, const RgbImage& b, const SsimParams& params = {});

}  // namespace egoview
