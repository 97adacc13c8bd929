#pragma once

#include <string_view>

#include <Eigen/Core>

#include "egoview/geometry.hpp"

namespace egoview {

enum class HandLayout { SingleHand21, TwoHands42 };

inline constexpr int keypoint_count(HandLayout layout) {
  return layout == HandLayout::SingleHand21 ? 21 : 42;
}
std::string_view to_string(HandLayout layout);
HandLayout hand_layout_from_string(std::string_view name);

using KeypointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Ordered 3D hand keypoints in meters, MANO joint order per hand.
struct HandPose {
  HandLayout layout = HandLayout::TwoHands42;
  KeypointMatrix keypoints;

  HandPose() = default;
  HandPose(HandLayout layout, KeypointMatrix keypoints);

  int size() const { return static_cast<int>(keypoints.rows()); }
  Eigen::Vector3d point(int i) const { return keypoints.row(i).transpose(); }

  /// Throws ValidationError when N does not match the layout or a
  /// coordinate is non-finite.
  void validate() const;
};

HandPose transform_pose(const HandPose& pose, const SimilarityTransform& transform);

/// Thresholds for rejecting ill-posed problems.
inline constexpr double kMinSourceVariance = 1e-12;
inline constexpr double kMinSingularValueRatio = 1e-9;

/// Least-squares similarity (s, R, t) minimizing
/// sum_i |target_i - (s R source_i + t)|^2, via SVD of the cross-covariance.
/// Correspondence is positional. Works on raw matrices so callers are not
/// limited to the hand layouts.
///
/// Throws InsufficientPoints when N < 3 and DegenerateConfiguration when the
/// source is (nearly) a single point or the problem is rank-deficient
/// (collinear data).
SimilarityTransform umeyama(const KeypointMatrix& source, const KeypointMatrix& target);
SimilarityTransform umeyama(const HandPose& source, const HandPose& target);

/// Transform taking exocentric-camera coordinates to egocentric-camera
/// coordinates: the inverse of the ego -> exo fit.
SimilarityTransform exo_to_ego_transform(const HandPose& exo_pose, const HandPose& ego_pose);

/// RMS of |target_i - T(source_i)| in meters.
double alignment_residual(const KeypointMatrix& source, const KeypointMatrix& target,
                          const SimilarityTransform& transform);
double alignment_residual(const HandPose& source, const HandPose& target,
                          const SimilarityTransform& transform);

}  // namespace egoview
