#pragma once

#include <optional>

#include "egoview/alignment.hpp"
#include "egoview/calibration.hpp"
#include "egoview/geometry.hpp"

namespace egoview {

/// Everything observed from the exocentric side plus the egocentric pose and
/// intrinsics needed to form the sparse egocentric map.
struct ViewTranslationInput {
  RgbImage exo_image;
  DepthMap exo_depth;                ///< relative or metric depth
  CameraIntrinsics exo_intrinsics;
  HandPose exo_pose;                 ///< metric, exocentric camera frame
  HandPose ego_pose;                 ///< metric, egocentric camera frame
  CameraIntrinsics ego_intrinsics;
  std::optional<DepthMap> hand_depth;  ///< metric hand depth; absent = depth already metric
};

struct ViewTranslationOptions {
  double delta = kDefaultScaleDelta;
  int splat_radius = kDefaultSplatRadius;
};

struct ViewTranslationResult {
  SparseEgoMap map;
  ScaleFactor scale;
  SimilarityTransform exo_to_ego;
  std::size_t cloud_size = 0;
};

/// Calibrate depth, unproject, align poses, move the cloud into the ego
/// camera and splat it. Throws NoValidDepth when the calibrated depth has no
/// valid pixel; other errors propagate from the individual steps.
ViewTranslationResult translate_view(const ViewTranslationInput& input,
                                     const ViewTranslationOptions& options = {});

SparseEgoMap build_sparse_ego_map(const ViewTranslationInput& input,
                                  const ViewTranslationOptions& options = {});

}  // namespace egoview
