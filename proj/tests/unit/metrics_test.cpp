#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "brlstm/error.hpp"
#include "brlstm/metrics.hpp"
#include "brlstm/rng.hpp"
#include "oracles.hpp"

namespace brlstm {
namespace {

using V = std::vector<double>;
using L = std::vector<int>;

TEST(R2, Examples) {
  EXPECT_EQ(r2(V{1, 2, 3}, V{1, 2, 3}), 1.0);
  EXPECT_EQ(r2(V{2, 2, 2}, V{1, 2, 3}), 0.0);
  EXPECT_EQ(r2(V{0, 0}, V{-1, 1}), 0.0);
  EXPECT_EQ(r2(V{1, -1}, V{-1, 1}), -3.0);
}

TEST(R2, Errors) {
  EXPECT_THROW(r2(V{1, 2}, V{3, 3}), ArgumentError);
  EXPECT_THROW(r2(V{1}, V{2}), ArgumentError);
  EXPECT_THROW(r2(V{1, 2}, V{1, 2, 3}), ArgumentError);
}

TEST(R2, ShiftInvariance) {
  RngStream gen(1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    V p(20), t(20);
    for (std::size_t k = 0; k < 20; ++k) {
      p[k] = gen.uniform(-1, 1);
      t[k] = gen.uniform(-1, 1);
    }
    const double c = gen.uniform(-10, 10);
    V ps = p, ts = t;
    for (std::size_t k = 0; k < 20; ++k) {
      ps[k] += c;
      ts[k] += c;
    }
    EXPECT_NEAR(r2(p, t), r2(ps, ts), 1e-10);
  }
}

TEST(Mse, NonNegativeAndExample) {
  EXPECT_EQ(mean_squared_error(V{0, 0}, V{1, -1}), 1.0);
  EXPECT_EQ(mean_squared_error(V{0.5}, V{0.5}), 0.0);
}

TEST(ConfusionMetrics, HandExample) {
  const auto m = confusion_metrics(V{0.9, 0.9, 0.1}, L{1, 0, 0});
  EXPECT_DOUBLE_EQ(m.accuracy, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.precision, 0.5);
  EXPECT_DOUBLE_EQ(m.recall, 1.0);
  EXPECT_DOUBLE_EQ(m.f1, 2.0 / 3.0);
}

TEST(ConfusionMetrics, AllCorrect) {
  const auto m = confusion_metrics(V{0.8, 0.2, 0.6}, L{1, 0, 1});
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_EQ(m.f1, 1.0);
}

TEST(ConfusionMetrics, NoPredictedPositives) {
  const auto m = confusion_metrics(V{0.1, 0.2, 0.3}, L{1, 0, 1});
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.f1, 0.0);
}

TEST(ConfusionMetrics, ThresholdIsInclusive) {
  EXPECT_EQ(confusion_counts(V{0.5}, L{1}).tp, 1);
}

TEST(ConfusionMetrics, EmptyInputRejected) {
  EXPECT_THROW(confusion_metrics(V{}, L{}), ArgumentError);
}

TEST(ConfusionMetrics, MatchesBruteForceOnAllLengthFourPatterns) {
  for (int pattern = 0; pattern < 256; ++pattern) {
    L label(4), predicted(4);
    V prob(4);
    for (int k = 0; k < 4; ++k) {
      label[k] = (pattern >> k) & 1;
      predicted[k] = (pattern >> (k + 4)) & 1;
      prob[k] = predicted[k] ? 0.75 : 0.25;
    }
    const auto m = confusion_metrics(prob, label);
    const auto o = testing::brute_confusion(predicted, label);
    EXPECT_DOUBLE_EQ(m.accuracy, o.accuracy) << pattern;
    EXPECT_DOUBLE_EQ(m.precision, o.precision) << pattern;
    EXPECT_DOUBLE_EQ(m.recall, o.recall) << pattern;
    EXPECT_DOUBLE_EQ(m.f1, o.f1) << pattern;
    for (double v : {m.accuracy, m.precision, m.recall, m.f1}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(RocAuc, Examples) {
  EXPECT_EQ(roc_auc(V{0.9, 0.8, 0.2, 0.1}, L{1, 1, 0, 0}), 1.0);
  EXPECT_EQ(roc_auc(V{0.4, 0.4, 0.4, 0.4}, L{1, 0, 1, 0}), 0.5);
  EXPECT_THROW(roc_auc(V{0.1, 0.2}, L{1, 1}), ArgumentError);
}

TEST(RocAuc, RandomScoresNearHalf) {
  RngStream gen(2, 2);
  V s(10000);
  L l(10000);
  for (std::size_t k = 0; k < s.size(); ++k) {
    s[k] = gen.uniform();
    l[k] = static_cast<int>(k % 2);
  }
  EXPECT_NEAR(roc_auc(s, l), 0.5, 0.02);
}

TEST(RocAuc, ComplementMonotoneInvarianceAndPairwiseOracle) {
  RngStream gen(3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 40;
    V s(n);
    L l(n);
    for (std::size_t k = 0; k < n; ++k) {
      // coarse grid so that ties occur
      s[k] = std::floor(gen.uniform() * 8.0) / 8.0;
      l[k] = gen.uniform() < 0.4;
    }
    l[0] = 0;
    l[1] = 1;
    const double auc = roc_auc(s, l);
    EXPECT_NEAR(auc, testing::pairwise_auc(s, l), 1e-12);
    V t(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = std::exp(3.0 * s[k]) - 7.0;
    EXPECT_NEAR(roc_auc(t, l), auc, 1e-12);

    V u(n), neg(n);
    for (std::size_t k = 0; k < n; ++k) {
      u[k] = gen.uniform();
      neg[k] = -u[k];
    }
    EXPECT_NEAR(roc_auc(u, l) + roc_auc(neg, l), 1.0, 1e-12);
  }
}

TEST(ClassificationMetricsTest, CombinesConfusionAndAuc) {
  const auto m = classification_metrics(V{0.9, 0.9, 0.1}, L{1, 0, 0});
  EXPECT_DOUBLE_EQ(m.f1, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.roc_auc, 0.75);
}

}  // namespace
}  // namespace brlstm
