#include <doctest.h>

#include <random>

#include "egoview/alignment.hpp"
#include "oracles.hpp"

using namespace egoview;

namespace {

KeypointMatrix apply(const SimilarityTransform& t, const KeypointMatrix& p) {
  KeypointMatrix out(p.rows(), 3);
  for (int i = 0; i < p.rows(); ++i) out.row(i) = t.apply(p.row(i).transpose()).transpose();
  return out;
}

double sse(const KeypointMatrix& src, const KeypointMatrix& dst, const SimilarityTransform& t) {
  return (apply(t, src) - dst).squaredNorm();
}

SimilarityTransform random_similarity(std::mt19937_64& rng) {
  return {std::uniform_real_distribution<double>(0.5, 2.0)(rng), oracle::random_rotation(rng),
          oracle::random_vector(rng, -1, 1)};
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected throw");
  return ErrorCode::ContractViolation;
}

}  // namespace

TEST_CASE("umeyama: identical sets give the identity") {
  std::mt19937_64 rng(2);
  const KeypointMatrix p = oracle::random_points(rng, 42, 0.2);
  const SimilarityTransform t = umeyama(p, p);
  CHECK(std::abs(t.scale - 1.0) < 1e-12);
  CHECK((t.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK(t.translation.norm() < 1e-12);
}

TEST_CASE("umeyama: pure translation and pure scale") {
  std::mt19937_64 rng(3);
  const KeypointMatrix p = oracle::random_points(rng, 21, 0.1);
  SimilarityTransform shift;
  shift.translation = {1, 0, 0};
  const SimilarityTransform a = umeyama(p, apply(shift, p));
  CHECK((a.translation - Eigen::Vector3d(1, 0, 0)).norm() < 1e-12);
  CHECK(std::abs(a.scale - 1.0) < 1e-12);

  SimilarityTransform grow;
  grow.scale = 2.0;
  const SimilarityTransform b = umeyama(p, apply(grow, p));
  CHECK(std::abs(b.scale - 2.0) < 1e-12);
  CHECK((b.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12);
}

TEST_CASE("umeyama: exact recovery of random similarities") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const SimilarityTransform truth = random_similarity(rng);
    const KeypointMatrix src = oracle::random_points(rng, 42, 0.15);
    const SimilarityTransform t = umeyama(src, apply(truth, src));
    CHECK(std::abs(t.scale - truth.scale) < 1e-9);
    CHECK((t.rotation - truth.rotation).norm() < 1e-9);
    CHECK((t.translation - truth.translation).norm() < 1e-9);
    CHECK(std::abs(t.rotation.determinant() - 1.0) < 1e-12);
    CHECK((t.rotation.transpose() * t.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(t.scale > 0.0);
  }
}

TEST_CASE("umeyama: reflected targets still give a proper rotation") {
  std::mt19937_64 rng(12);
  const KeypointMatrix src = oracle::random_points(rng, 42, 0.2);
  KeypointMatrix dst = src;
  dst.col(0) *= -1.0;
  const SimilarityTransform t = umeyama(src, dst);
  CHECK(std::abs(t.rotation.determinant() - 1.0) < 1e-12);
}

TEST_CASE("umeyama: the returned transform is a local optimum") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (int trial = 0; trial < 20; ++trial) {
    const KeypointMatrix src = oracle::random_points(rng, 42, 0.2);
    KeypointMatrix dst = apply(random_similarity(rng), src);
    for (double& v : dst.reshaped()) v += noise(rng);
    const SimilarityTransform t = umeyama(src, dst);
    const double best = sse(src, dst, t);
    for (int k = 0; k < 30; ++k) {
      SimilarityTransform p = t;
      const double eps = 1e-4;
      p.scale *= 1.0 + eps * noise(rng) * 100;
      const Eigen::Vector3d axis = oracle::random_vector(rng, -1, 1).normalized();
      p.rotation = Eigen::AngleAxisd(eps, axis).toRotationMatrix() * p.rotation;
      p.translation += eps * oracle::random_vector(rng, -1, 1);
      CHECK(sse(src, dst, p) >= best);
    }
  }
}

TEST_CASE("umeyama: translating both sets only changes the translation") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const KeypointMatrix src = oracle::random_points(rng, 42, 0.2);
    KeypointMatrix dst = apply(random_similarity(rng), src);
    std::normal_distribution<double> noise(0.0, 0.005);
    for (double& v : dst.reshaped()) v += noise(rng);
    const SimilarityTransform a = umeyama(src, dst);
    const Eigen::RowVector3d c = oracle::random_vector(rng, -5, 5).transpose();
    const SimilarityTransform b = umeyama(KeypointMatrix(src.rowwise() + c), KeypointMatrix(dst.rowwise() + c));
    CHECK(std::abs(a.scale - b.scale) < 1e-9);
    CHECK((a.rotation - b.rotation).norm() < 1e-9);
  }
}

TEST_CASE("umeyama: error paths") {
  KeypointMatrix two(2, 3);
  two << 0, 0, 0, 1, 0, 0;
  CHECK(code_of([&] { (void)umeyama(two, two); }) == ErrorCode::InsufficientPoints);

  KeypointMatrix same(5, 3);
  same.rowwise() = Eigen::RowVector3d(0.1, 0.2, 0.3);
  CHECK(code_of([&] { (void)umeyama(same, same); }) == ErrorCode::DegenerateConfiguration);

  KeypointMatrix line(6, 3);
  for (int i = 0; i < 6; ++i) line.row(i) = Eigen::RowVector3d(i, 2.0 * i, -i);
  CHECK(code_of([&] { (void)umeyama(line, line); }) == ErrorCode::DegenerateConfiguration);

  KeypointMatrix three(3, 3);
  three << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  CHECK(code_of([&] { (void)umeyama(three, KeypointMatrix(4, 3)); }) == ErrorCode::ContractViolation);
}

TEST_CASE("umeyama: three non-collinear points are enough") {
  KeypointMatrix src(3, 3);
  src << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  SimilarityTransform truth;
  truth.scale = 1.5;
  truth.rotation = Eigen::AngleAxisd(0.3, Eigen::Vector3d::UnitX()).toRotationMatrix();
  truth.translation = {0.2, -0.1, 1.0};
  const SimilarityTransform t = umeyama(src, apply(truth, src));
  CHECK(std::abs(t.scale - 1.5) < 1e-9);
  CHECK((t.rotation - truth.rotation).norm() < 1e-9);
}

TEST_CASE("HandPose layouts") {
  CHECK(hand_layout_from_string("single_hand_21") == HandLayout::SingleHand21);
  CHECK(hand_layout_from_string("two_hands_42") == HandLayout::TwoHands42);
  CHECK(to_string(HandLayout::TwoHands42) == "two_hands_42");
  CHECK_THROWS_AS((void)hand_layout_from_string("three_hands"), ValidationError);
  CHECK_THROWS_AS(HandPose(HandLayout::SingleHand21, KeypointMatrix::Zero(42, 3)).validate(), ValidationError);
  CHECK_NOTHROW(HandPose(HandLayout::SingleHand21, KeypointMatrix::Zero(21, 3)).validate());
  KeypointMatrix bad = KeypointMatrix::Zero(21, 3);
  bad(4, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(HandPose(HandLayout::SingleHand21, bad).validate(), ValidationError);
}

TEST_CASE("exo_to_ego_transform maps exo keypoints onto ego keypoints") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const HandPose ego(HandLayout::TwoHands42, oracle::random_points(rng, 42, 0.2));
    const SimilarityTransform ego_to_exo = random_similarity(rng);
    const HandPose exo = transform_pose(ego, ego_to_exo);
    const SimilarityTransform t = exo_to_ego_transform(exo, ego);
    CHECK(alignment_residual(exo, ego, t) < 1e-9);
    CHECK(std::abs(t.scale * ego_to_exo.scale - 1.0) < 1e-9);
  }
}

TEST_CASE("alignment_residual is the RMS distance") {
  KeypointMatrix a = KeypointMatrix::Zero(4, 3);
  KeypointMatrix b = KeypointMatrix::Zero(4, 3);
  b(0, 0) = 2.0;
  CHECK(alignment_residual(a, b, SimilarityTransform::identity()) == doctest::Approx(1.0));
}

TEST_CASE("umeyama: perturbations never lower the residual over 100 problems") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (int trial = 0; trial < 100; ++trial) {
    const KeypointMatrix src = oracle::random_points(rng, 42, 0.2);
    KeypointMatrix dst = apply(random_similarity(rng), src);
    for (double& v : dst.reshaped()) v += noise(rng);
    const SimilarityTransform t = umeyama(src, dst);
    const double best = alignment_residual(src, dst, t);
    for (int k = 0; k < 5; ++k) {
      SimilarityTransform p = t;
      p.scale *= 1.0 + 1e-3 * noise(rng) * 100;
      p.rotation = Eigen::AngleAxisd(1e-3, oracle::random_vector(rng, -1, 1).normalized()).toRotationMatrix() *
                   p.rotation;
      p.translation += 1e-3 * oracle::random_vector(rng, -1, 1);
      CHECK(alignment_residual(src, dst, p) >= best);
    }
  }
}

TEST_CASE("alignment_residual examples") {
  std::mt19937_64 rng(32);
  const KeypointMatrix a = oracle::random_points(rng, 21, 0.2);
  CHECK(alignment_residual(a, a, SimilarityTransform::identity()) == 0.0);
  KeypointMatrix b = a;
  b.col(1).array() += 1.0;
  CHECK(alignment_residual(a, b, SimilarityTransform::identity()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(alignment_residual(a, b, umeyama(a, b)) < 1e-9);
}

TEST_CASE("exo_to_ego_transform: identical poses give the identity") {
  std::mt19937_64 rng(33);
  const HandPose p(HandLayout::TwoHands42, oracle::random_points(rng, 42, 0.2));
  const SimilarityTransform t = exo_to_ego_transform(p, p);
  CHECK(std::abs(t.scale - 1.0) < 1e-12);
  CHECK((t.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK(t.translation.norm() < 1e-12);
}
