#pragma once

#include <cstddef>

#include "egoview/image.hpp"

namespace egoview {

/// Pixels where the rendered hand depth is valid.
struct HandRegion {
  Mask mask;

  std::size_t size() const { return count_set(mask); }
};

struct ScaleFactor {
  double value = 1.0;
  std::size_t sample_count = 0;
};

inline constexpr double kDefaultScaleDelta = 1e-6;

HandRegion hand_region_from_depth(const DepthMap& hand_depth);

/// Median over the region of hand_depth / (est_depth + delta). An even
/// sample count takes the midpoint of the central pair.
///
/// Throws EmptyRegion for an empty region and InvalidSample when est_depth
/// is invalid (or hand_depth is invalid) on a region pixel.
ScaleFactor compute_scale(const DepthMap& hand_depth, const DepthMap& est_depth,
                          const HandRegion& region, double delta = kDefaultScaleDelta);

/// Multiplies every valid entry by s; invalid entries stay invalid.
DepthMap apply_scale(const DepthMap& depth, const ScaleFactor& s);

}  // namespace egoview
