#include "egoview/reprojection.hpp"

namespace egoview {

ViewTranslationResult translate_view(const ViewTranslationInput& input,
                                     const ViewTranslationOptions& options) {
  input.exo_intrinsics.validate();
  input.ego_intrinsics.validate();
  require(input.exo_depth.same_shape(input.exo_intrinsics.width, input.exo_intrinsics.height),
          "translate_view: exocentric depth does not match intrinsics");
  require(input.exo_image.same_shape(input.exo_intrinsics.width, input.exo_intrinsics.height),
          "translate_view: exocentric image does not match intrinsics");
  require(input.exo_pose.layout == input.ego_pose.layout,
          "translate_view: hand poses use different layouts");
  input.exo_pose.validate();
  input.ego_pose.validate();

  ViewTranslationResult result;
  result.scale = ScaleFactor{1.0, 0};
  if (input.hand_depth) {
    const HandRegion region = hand_region_from_depth(*input.hand_depth);
    result.scale = compute_scale(*input.hand_depth, input.exo_depth, region, options.delta);
  }
  const DepthMap metric_depth = apply_scale(input.exo_depth, result.scale);

  const PointCloud exo_cloud = unproject(metric_depth, input.exo_image, input.exo_intrinsics);
  if (exo_cloud.empty()) {
    fail(ErrorCode::NoValidDepth, "translate_view: exocentric depth has no valid pixel");
  }
  result.cloud_size = exo_cloud.size();

  result.exo_to_ego = exo_to_ego_transform(input.exo_pose, input.ego_pose);
  const PointCloud ego_cloud = apply_transform(exo_cloud, result.exo_to_ego);
  result.map = project_points(ego_cloud, input.ego_intrinsics, options.splat_radius);
  return result;
}

SparseEgoMap build_sparse_ego_map(const ViewTranslationInput& input,
                                  const ViewTranslationOptions& options) {
  return translate_view(input, options).map;
}

}  // namespace egoview
