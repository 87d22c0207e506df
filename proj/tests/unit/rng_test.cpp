#include <cmath>
#include <cstring>
#include <vector>

#include <gtest/gtest.h>

#include "brlstm/error.hpp"
#include "brlstm/rng.hpp"
#include "oracles.hpp"

namespace brlstm {
namespace {

TEST(GaussianTest, ZeroStdReturnsMeanExactly) {
  RngStream s(1, 2);
  EXPECT_EQ(gaussian(s, 0.0, 0.0), 0.0);
  EXPECT_EQ(gaussian(s, 3.25, 0.0), 3.25);
}

TEST(GaussianTest, RejectsNegativeOrNonFiniteStd) {
  RngStream s(1, 2);
  EXPECT_THROW(gaussian(s, 0.0, -1.0), ArgumentError);
  EXPECT_THROW(gaussian(s, 0.0, std::nan("")), ArgumentError);
  EXPECT_THROW(gaussian(s, 0.0, INFINITY), ArgumentError);
}

TEST(GaussianTest, SameSeedStreamIndexGivesSameValue) {
  RngStream a(42, 7), b(42, 7);
  for (int k = 0; k < 100; ++k) {
    const double x = gaussian(a, 0.0, 1.0);
    const double y = gaussian(b, 0.0, 1.0);
    EXPECT_EQ(std::memcmp(&x, &y, sizeof x), 0);
  }
  EXPECT_EQ(RngStream(42, 7).at(123), RngStream(42, 7).at(123));
}

TEST(GaussianTest, SampleMeanWithinCltBound) {
  // 3 standard errors of the mean of 1e5 unit normals: 3 / sqrt(1e5).
  constexpr int kDraws = 100000;
  const double bound = 3.0 / std::sqrt(static_cast<double>(kDraws));
  RngStream s(2024, 1);
  std::vector<double> v(kDraws);
  for (double& x : v) x = gaussian(s, 0.0, 1.0);
  EXPECT_LT(std::abs(testing::sample_moments(v).mean), bound);
}

TEST(GaussianProperty, VarianceWithinFivePercent) {
  for (double sd : {0.5, 1.0, 2.0}) {
    RngStream s(77, static_cast<std::uint64_t>(sd * 100));
    std::vector<double> v(100000);
    for (double& x : v) x = gaussian(s, 1.0, sd);
    const double var = testing::sample_moments(v).variance;
    EXPECT_NEAR(var / (sd * sd), 1.0, 0.05) << "std " << sd;
  }
}

TEST(RngStreamTest, DistinctStreamsAreUncorrelated) {
  RngStream a(5, 1), b(5, 2);
  constexpr int kDraws = 50000;
  double sxy = 0.0;
  for (int k = 0; k < kDraws; ++k) sxy += a.standard_normal() * b.standard_normal();
  // Correlation estimate has standard error 1/sqrt(n).
  EXPECT_LT(std::abs(sxy / kDraws), 4.0 / std::sqrt(static_cast<double>(kDraws)));
}

TEST(RngStreamTest, DeriveDoesNotAdvanceParent) {
  RngStream a(9, 9);
  const auto before = a.position();
  const RngStream child = a.derive(3);
  EXPECT_EQ(a.position(), before);
  EXPECT_NE(child.stream_id(), a.stream_id());
  EXPECT_EQ(child.stream_id(), a.derive(3).stream_id());
}

TEST(RngStreamTest, UniformInUnitInterval) {
  RngStream s(3, 3);
  for (int k = 0; k < 10000; ++k) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace brlstm
