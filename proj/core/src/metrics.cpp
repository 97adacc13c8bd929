#include "egoview/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace egoview {

void SsimParams::validate() const {
  if (window_size < 1 || window_size % 2 == 0) throw ValidationError("window_size", "must be odd and positive");
  if (!(gaussian_sigma > 0.0)) throw ValidationError("gaussian_sigma", "must be > 0");
  if (!(k1 > 0.0)) throw ValidationError("k1", "must be > 0");
  if (!(k2 > 0.0)) throw ValidationError("k2", "must be > 0");
  if (!(dynamic_range > 0.0)) throw ValidationError("dynamic_range", "must be > 0");
}

double mse(const RgbImage& a, const RgbImage& b) {
  require(a.same_shape(b), "mse: image dimensions differ");
  const auto va = a.values();
  const auto vb = b.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double d = va[i] - vb[i];
    sum += d * d;
  }
  return sum / static_cast<double>(va.size());
}

double masked_mse(const RgbImage& a, const RgbImage& b, const Mask& mask) {
  require(a.same_shape(b) && mask.same_shape(a.width(), a.height()),
          "masked_mse: dimensions differ");
  double sum = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (!mask.at(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        const double d = a.at(x, y, c) - b.at(x, y, c);
        sum += d * d;
      }
      count += 3;
    }
  }
  if (count == 0) fail(ErrorCode::EmptyRegion, "masked_mse: mask is empty");
  return sum / static_cast<double>(count);
}

double psnr_from_mse(double mse_value, double max_value) {
  require(max_value > 0.0, "psnr: max_value must be > 0");
  if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_value * max_value / mse_value);
}

double psnr(const RgbImage& a, const RgbImage& b, double max_value) {
  return psnr_from_mse(mse(a, b), max_value);
}

namespace {

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> kernel(static_cast<std::size_t>(size));
  const int half = size / 2;
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    const double x = i - half;
    kernel[static_cast<std::size_t>(i)] = std::exp(-(x * x) / (2.0 * sigma * sigma));
    total += kernel[static_cast<std::size_t>(i)];
  }
  for (double& k : kernel) k /= total;
  return kernel;
}

// Separable valid-region filter of a w x h plane; output (w-n+1) x (h-n+1).
std::vector<double> filter_valid(const std::vector<double>& plane, int w, int h,
                                 const std::vector<double>& kernel) {
  const int n = static_cast<int>(kernel.size());
  const int ow = w - n + 1;
  const int oh = h - n + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    const double* src = plane.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += kernel[static_cast<std::size_t>(k)] * src[x + k];
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        acc += kernel[static_cast<std::size_t>(k)] * rows[static_cast<std::size_t>(y + k) * ow + x];
      }
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

double ssim(const RgbImage& a, const RgbImage& b, const SsimParams& params) {
  params.validate();
  require(a.same_shape(b), "ssim: image dimensions differ");
  require(a.width() >= params.window_size && a.height() >= params.window_size,
          "ssim: images are smaller than the window");

  const int w = a.width();
  const int h = a.height();
  const auto kernel = gaussian_kernel(params.window_size, params.gaussian_sigma);
  const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
  const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);

  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> pa(n), pb(n), paa(n), pbb(n), pab(n);
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        pa[i] = a.at(x, y, c);
        pb[i] = b.at(x, y, c);
        paa[i] = pa[i] * pa[i];
        pbb[i] = pb[i] * pb[i];
        pab[i] = pa[i] * pb[i];
      }
    }
    const auto mu_a = filter_valid(pa, w, h, kernel);
    const auto mu_b = filter_valid(pb, w, h, kernel);
    const auto e_aa = filter_valid(paa, w, h, kernel);
    const auto e_bb = filter_valid(pbb, w, h, kernel);
    const auto e_ab = filter_valid(pab, w, h, kernel);

    double channel_sum = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
      const double ma = mu_a[i];
      const double mb = mu_b[i];
      const double var_a = e_aa[i] - ma * ma;
      const double var_b = e_bb[i] - mb * mb;
      const double cov = e_ab[i] - ma * mb;
      const double num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
      const double den = (ma * ma + mb * mb + c1) * (var_a + var_b + c2);
      channel_sum += num / den;
    }
    total += channel_sum / static_cast<double>(mu_a.size());
  }
  return total / 3.0;
}

}  // namespace egoview
