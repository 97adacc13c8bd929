#include <doctest.h>

#include <algorithm>
#include <random>

#include "egoview/calibration.hpp"

using namespace egoview;

namespace {

DepthMap row(std::initializer_list<double> values) {
  DepthMap d(int(values.size()), 1);
  std::copy(values.begin(), values.end(), d.values().begin());
  return d;
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

TEST_CASE("compute_scale: identical maps give 1") {
  const DepthMap d = row({0.4, 0.9, 1.3});
  const ScaleFactor s = compute_scale(d, d, hand_region_from_depth(d), 0.0);
  CHECK(s.value == 1.0);
  CHECK(s.sample_count == 3);
}

TEST_CASE("compute_scale: uniform factor is recovered to double precision") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> depth(0.2, 4.0);
  std::uniform_real_distribution<double> factor(0.1, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double k = factor(rng);
    DepthMap est(16, 16);
    DepthMap hand(16, 16);
    for (std::size_t i = 0; i < est.size(); ++i) {
      est.values()[i] = depth(rng);
      hand.values()[i] = k * est.values()[i];
    }
    const ScaleFactor s = compute_scale(hand, est, hand_region_from_depth(hand), 0.0);
    CHECK(std::abs(s.value - k) / k < 1e-12);
  }
}

TEST_CASE("compute_scale: median of mixed ratios") {
  const DepthMap est = row({1, 1, 1});
  const DepthMap hand = row({0.5, 1.0, 2.0});
  CHECK(compute_scale(hand, est, hand_region_from_depth(hand), 0.0).value == 1.0);
}

TEST_CASE("compute_scale: even count averages the central pair") {
  const DepthMap est = row({1, 1, 1, 1});
  const DepthMap hand = row({1, 2, 4, 100});
  CHECK(compute_scale(hand, est, hand_region_from_depth(hand), 0.0).value == 3.0);
}

TEST_CASE("compute_scale: only region pixels participate") {
  const DepthMap est = row({1, 1, 1});
  const DepthMap hand = row({2, 0, 2});
  const HandRegion region = hand_region_from_depth(hand);
  CHECK(region.size() == 2);
  const ScaleFactor s = compute_scale(hand, est, region, 0.0);
  CHECK(s.value == 2.0);
  CHECK(s.sample_count == 2);
}

TEST_CASE("compute_scale: robust to just under half outliers") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> depth(0.3, 2.0);
  std::uniform_real_distribution<double> junk(0.0, 1000.0);
  const int n = 101;
  const int outliers = 49;
  const double k = 2.5;
  for (int trial = 0; trial < 20; ++trial) {
    DepthMap est(n, 1);
    DepthMap hand(n, 1);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (int j = 0; j < n; ++j) {
      const int i = order[j];
      est.at(i, 0) = depth(rng);
      hand.at(i, 0) = j < outliers ? junk(rng) * est.at(i, 0) + 1e-3 : k * est.at(i, 0);
    }
    // 52 clean ratios always cover the middle of the sorted list.
    CHECK(std::abs(compute_scale(hand, est, hand_region_from_depth(hand), 0.0).value - k) < 1e-14);
  }
}

TEST_CASE("compute_scale: outliers all on one side still return the clean factor") {
  const int n = 98;
  const int outliers = 39;
  const double k = 0.75;
  DepthMap est(n, 1, 1.25);
  DepthMap hand(n, 1, k * 1.25);
  for (int i = 0; i < outliers; ++i) hand.at(i * 2, 0) = 50.0 + i;
  CHECK(std::abs(compute_scale(hand, est, hand_region_from_depth(hand), 0.0).value - k) < 1e-15);
  for (int i = 0; i < outliers; ++i) hand.at(i * 2, 0) = 1e-4 * (i + 1);
  CHECK(std::abs(compute_scale(hand, est, hand_region_from_depth(hand), 0.0).value - k) < 1e-15);
}

TEST_CASE("compute_scale: delta offsets the estimated depth") {
  const DepthMap est = row({1.0});
  const DepthMap hand = row({2.0});
  CHECK(compute_scale(hand, est, hand_region_from_depth(hand), 1.0).value == 1.0);
  CHECK(compute_scale(hand, est, hand_region_from_depth(hand)).value ==
        doctest::Approx(2.0 / (1.0 + kDefaultScaleDelta)));
}

TEST_CASE("compute_scale: error paths") {
  const DepthMap est = row({1, 1});
  const DepthMap none = row({0, 0});
  CHECK(code_of([&] { (void)compute_scale(none, est, hand_region_from_depth(none)); }) ==
        ErrorCode::EmptyRegion);

  const DepthMap hand = row({1, 1});
  const DepthMap bad = row({1, std::numeric_limits<double>::quiet_NaN()});
  CHECK(code_of([&] { (void)compute_scale(hand, bad, hand_region_from_depth(hand)); }) ==
        ErrorCode::InvalidSample);
  const DepthMap zero = row({1, 0});
  CHECK(code_of([&] { (void)compute_scale(hand, zero, hand_region_from_depth(hand)); }) ==
        ErrorCode::InvalidSample);

  CHECK(code_of([&] { (void)compute_scale(hand, row({1, 1, 1}), hand_region_from_depth(hand)); }) ==
        ErrorCode::ContractViolation);
}

TEST_CASE("apply_scale multiplies valid entries only") {
  const DepthMap d = row({1.0, 0.0, -1.0, 2.0});
  const DepthMap out = apply_scale(d, {3.0, 1});
  CHECK(out.at(0, 0) == 3.0);
  CHECK_FALSE(is_valid_depth(out.at(1, 0)));
  CHECK_FALSE(is_valid_depth(out.at(2, 0)));
  CHECK(out.at(3, 0) == 6.0);
}

TEST_CASE("hand_region_from_depth") {
  CHECK(hand_region_from_depth(DepthMap(4, 3, 0.0)).size() == 0);
  CHECK(hand_region_from_depth(DepthMap(4, 3, 0.7)).size() == 12);
  DepthMap checker(5, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) checker.at(x, y) = (x + y) % 2 ? 1.0 : -1.0;
  const HandRegion r = hand_region_from_depth(checker);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) CHECK(r.mask.at(x, y) == (x + y) % 2);
}

TEST_CASE("apply_scale examples") {
  const DepthMap d = row({1.5, 0.25});
  CHECK(apply_scale(d, {1.0, 1}) == d);
  CHECK(apply_scale(d, {2.0, 1}).at(0, 0) == 3.0);
}

TEST_CASE("compute_scale: scale equivariance and self-consistency") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> depth(0.2, 3.0);
  std::uniform_real_distribution<double> factor(0.1, 10.0);
  for (int trial = 0; trial < 30; ++trial) {
    DepthMap est(9, 9);
    DepthMap hand(9, 9);
    for (std::size_t i = 0; i < est.size(); ++i) {
      est.values()[i] = depth(rng);
      hand.values()[i] = depth(rng);
    }
    const HandRegion region = hand_region_from_depth(hand);
    const double base = compute_scale(hand, est, region, 0.0).value;
    const double c = factor(rng);
    DepthMap scaled = hand;
    for (double& v : scaled.values()) v *= c;
    CHECK(compute_scale(scaled, est, region, 0.0).value == doctest::Approx(c * base).epsilon(1e-12));

    // Scaling est by the recovered factor leaves nothing to correct.
    const ScaleFactor s{factor(rng), 0};
    const DepthMap target = apply_scale(est, s);
    const ScaleFactor recovered = compute_scale(target, est, hand_region_from_depth(target), 0.0);
    CHECK(std::abs(recovered.value - s.value) < 1e-12 * s.value);
    const DepthMap metric = apply_scale(est, recovered);
    CHECK(std::abs(compute_scale(target, metric, hand_region_from_depth(target), 0.0).value - 1.0) < 1e-12);
  }
}
