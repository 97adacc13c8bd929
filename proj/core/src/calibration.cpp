#include "egoview/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace egoview {

HandRegion hand_region_from_depth(const DepthMap& hand_depth) {
  HandRegion region{Mask(hand_depth.width(), hand_depth.height(), 0)};
  for (int y = 0; y < hand_depth.height(); ++y) {
    for (int x = 0; x < hand_depth.width(); ++x) {
      region.mask.at(x, y) = is_valid_depth(hand_depth.at(x, y)) ? 1 : 0;
    }
  }
  return region;
}

ScaleFactor compute_scale(const DepthMap& hand_depth, const DepthMap& est_depth,
                          const HandRegion& region, double delta) {
  require(hand_depth.same_shape(est_depth) && hand_depth.same_shape(region.mask),
          "compute_scale: grids must share dimensions");
  require(std::isfinite(delta) && delta >= 0.0, "compute_scale: delta must be >= 0");

  std::vector<double> ratios;
  for (int y = 0; y < hand_depth.height(); ++y) {
    for (int x = 0; x < hand_depth.width(); ++x) {
      if (!region.mask.at(x, y)) continue;
      const double est = est_depth.at(x, y);
      const double hand = hand_depth.at(x, y);
      if (!is_valid_depth(est) || !is_valid_depth(hand)) {
        fail(ErrorCode::InvalidSample, "compute_scale: invalid depth at pixel (" +
                                           std::to_string(x) + ", " + std::to_string(y) + ")");
      }
      ratios.push_back(hand / (est + delta));
    }
  }
  if (ratios.empty()) fail(ErrorCode::EmptyRegion, "compute_scale: hand region is empty");

  const std::size_t n = ratios.size();
  const auto upper = ratios.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(ratios.begin(), upper, ratios.end());
  double median = *upper;
  if (n % 2 == 0) {
    const double lower = *std::max_element(ratios.begin(), upper);
    median = lower + 0.5 * (median - lower);
  }
  if (!(std::isfinite(median) && median > 0.0)) {
    fail(ErrorCode::InvalidSample, "compute_scale: median ratio is not a positive finite value");
  }
  return {median, n};
}

DepthMap apply_scale(const DepthMap& depth, const ScaleFactor& s) {
  require(std::isfinite(s.value) && s.value > 0.0, "apply_scale: scale must be finite and > 0");
  DepthMap out = depth;
  for (double& d : out.values()) {
    if (is_valid_depth(d)) d *= s.value;
  }
  return out;
}

}  // namespace egoview
