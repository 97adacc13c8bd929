#include "egoview/alignment.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace egoview {

std::string_view to_string(HandLayout layout) {
  return layout == HandLayout::SingleHand21 ? "single_hand_21" : "two_hands_42";
}

HandLayout hand_layout_from_string(std::string_view name) {
  if (name == "single_hand_21") return HandLayout::SingleHand21;
  if (name == "two_hands_42") return HandLayout::TwoHands42;
  throw ValidationError("layout", "unknown hand layout '" + std::string(name) + "'");
}

HandPose::HandPose(HandLayout layout_, KeypointMatrix keypoints_)
    : layout(layout_), keypoints(std::move(keypoints_)) {}

void HandPose::validate() const {
  if (keypoints.rows() != keypoint_count(layout)) {
    throw ValidationError("keypoints", "expected " + std::to_string(keypoint_count(layout)) +
                                           " keypoints for layout " + std::string(to_string(layout)) +
                                           ", got " + std::to_string(keypoints.rows()));
  }
  if (!keypoints.allFinite()) throw ValidationError("keypoints", "non-finite coordinate");
}

HandPose transform_pose(const HandPose& pose, const SimilarityTransform& transform) {
  HandPose out = pose;
  for (int i = 0; i < pose.size(); ++i) {
    out.keypoints.row(i) = transform.apply(pose.point(i)).transpose();
  }
  return out;
}

SimilarityTransform umeyama(const KeypointMatrix& source, const KeypointMatrix& target) {
  require(source.rows() == target.rows(), "umeyama: point sets differ in size");
  const Eigen::Index n = source.rows();
  if (n < 3) {
    fail(ErrorCode::InsufficientPoints,
         "umeyama: need at least 3 correspondences, got " + std::to_string(n));
  }

  const Eigen::RowVector3d source_mean = source.colwise().mean();
  const Eigen::RowVector3d target_mean = target.colwise().mean();
  const KeypointMatrix source_centered = source.rowwise() - source_mean;
  const KeypointMatrix target_centered = target.rowwise() - target_mean;

  const double inv_n = 1.0 / static_cast<double>(n);
  const double source_variance = source_centered.squaredNorm() * inv_n;
  if (source_variance < kMinSourceVariance) {
    fail(ErrorCode::DegenerateConfiguration, "umeyama: source points are coincident");
  }

  const Eigen::Matrix3d covariance = inv_n * target_centered.transpose() * source_centered;
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(covariance,
                                              Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d& singular = svd.singularValues();
  if (!(singular(0) > 0.0) || singular(1) < kMinSingularValueRatio * singular(0)) {
    fail(ErrorCode::DegenerateConfiguration,
         "umeyama: cross-covariance has rank <= 1, rotation is not unique");
  }

  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Vector3d sign = Eigen::Vector3d::Ones();
  if (u.determinant() * v.determinant() < 0.0) sign(2) = -1.0;

  SimilarityTransform result;
  result.rotation = u * sign.asDiagonal() * v.transpose();
  result.scale = singular.dot(sign) / source_variance;
  result.translation =
      target_mean.transpose() - result.scale * (result.rotation * source_mean.transpose());
  return result;
}

SimilarityTransform umeyama(const HandPose& source, const HandPose& target) {
  require(source.size() == target.size(), "umeyama: poses differ in keypoint count");
  return umeyama(source.keypoints, target.keypoints);
}

SimilarityTransform exo_to_ego_transform(const HandPose& exo_pose, const HandPose& ego_pose) {
  return invert_transform(umeyama(ego_pose, exo_pose));
}

double alignment_residual(const KeypointMatrix& source, const KeypointMatrix& target,
                          const SimilarityTransform& transform) {
  require(source.rows() == target.rows(), "alignment_residual: point sets differ in size");
  if (source.rows() == 0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < source.rows(); ++i) {
    const Eigen::Vector3d mapped = transform.apply(source.row(i).transpose());
    sum += (target.row(i).transpose() - mapped).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(source.rows()));
}

double alignment_residual(const HandPose& source, const HandPose& target,
                          const SimilarityTransform& transform) {
  return alignment_residual(source.keypoints, target.keypoints, transform);
}

}  // namespace egoview
