// Independent reference computations used only by the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace brlstm::testing {

/// Central difference (f(x+h) - f(x-h)) / 2h.
inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// |a - b| / max(|a|, |b|, floor).
inline double relative_error(double a, double b, double floor = 1e-4) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Two-pass mean and unbiased variance.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

inline Moments sample_moments(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  const double mean = s / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, ss / static_cast<double>(v.size() - 1)};
}

/// AUC by comparing every positive with every negative; ties count 1/2.
inline double pairwise_auc(std::span<const double> score, std::span<const int> label) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < score.size(); ++i) {
    if (label[i] != 1) continue;
    for (std::size_t j = 0; j < score.size(); ++j) {
      if (label[j] != 0) continue;
      pairs += 1.0;
      if (score[i] > score[j]) wins += 1.0;
      else if (score[i] == score[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

/// Confusion-matrix metrics by counting each cell separately.
struct BruteConfusion {
  double accuracy, precision, recall, f1;
};

inline BruteConfusion brute_confusion(const std::vector<int>& predicted,
                                      const std::vector<int>& label) {
  int tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t k = 0; k < label.size(); ++k) {
    tp += predicted[k] == 1 && label[k] == 1;
    fp += predicted[k] == 1 && label[k] == 0;
    tn += predicted[k] == 0 && label[k] == 0;
    fn += predicted[k] == 0 && label[k] == 1;
  }
  BruteConfusion c{};
  c.accuracy = static_cast<double>(tp + tn) / static_cast<double>(label.size());
  c.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
  c.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
  c.f1 = (c.precision + c.recall) == 0.0
             ? 0.0
             : 2.0 * c.precision * c.recall / (c.precision + c.recall);
  return c;
}

}  // namespace brlstm::testing
