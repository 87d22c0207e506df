#include "brlstm/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "brlstm/error.hpp"

namespace brlstm {
namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ArgumentError(std::string(what) + ": length mismatch " + std::to_string(a) + " vs " +
                        std::to_string(b));
  }
  if (a == 0) throw ArgumentError(std::string(what) + ": empty input");
}

void check_labels(std::span<const int> label, const char* what) {
  for (int l : label) {
    if (l != 0 && l != 1) throw ArgumentError(std::string(what) + ": labels must be 0 or 1");
  }
}

}  // namespace

double mean_squared_error(std::span<const double> pred, std::span<const double> target) {
  check_lengths(pred.size(), target.size(), "mean_squared_error");
  double s = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) s += (pred[k] - target[k]) * (pred[k] - target[k]);
  return s / static_cast<double>(pred.size());
}

double r2(std::span<const double> pred, std::span<const double> target) {
  check_lengths(pred.size(), target.size(), "r2");
  if (pred.size() < 2) throw ArgumentError("r2: need at least 2 points");
  const double mean =
      std::accumulate(target.begin(), target.end(), 0.0) / static_cast<double>(target.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    ss_res += (target[k] - pred[k]) * (target[k] - pred[k]);
    ss_tot += (target[k] - mean) * (target[k] - mean);
  }
  if (ss_tot == 0.0) throw ArgumentError("r2: target is constant");
  return 1.0 - ss_res / ss_tot;
}

ConfusionCounts confusion_counts(std::span<const double> prob, std::span<const int> label,
                                 double threshold) {
  check_lengths(prob.size(), label.size(), "confusion_metrics");
  check_labels(label, "confusion_metrics");
  ConfusionCounts c;
  for (std::size_t k = 0; k < prob.size(); ++k) {
    const bool predicted = prob[k] >= threshold;
    if (predicted && label[k] == 1) ++c.tp;
    else if (predicted) ++c.fp;
    else if (label[k] == 1) ++c.fn;
    else ++c.tn;
  }
  return c;
}

ClassificationMetrics confusion_metrics(std::span<const double> prob, std::span<const int> label,
                                        double threshold) {
  const ConfusionCounts c = confusion_counts(prob, label, threshold);
  auto ratio = [](long num, long den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  ClassificationMetrics m;
  m.accuracy = ratio(c.tp + c.tn, c.tp + c.tn + c.fp + c.fn);
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.f1 = m.precision + m.recall == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

double roc_auc(std::span<const double> score, std::span<const int> label) {
  check_lengths(score.size(), label.size(), "roc_auc");
  check_labels(label, "roc_auc");
  const std::size_t n = score.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });

  // Sum of midranks of the positives.
  double rank_sum = 0.0;
  long positives = 0;
  for (std::size_t k = 0; k < n;) {
    std::size_t j = k;
    while (j < n && score[order[j]] == score[order[k]]) ++j;
    const double midrank = 0.5 * static_cast<double>(k + 1 + j);
    for (std::size_t q = k; q < j; ++q) {
      if (label[order[q]] == 1) {
        rank_sum += midrank;
        ++positives;
      }
    }
    k = j;
  }
  const long negatives = static_cast<long>(n) - positives;
  if (positives == 0 || negatives == 0) {
    throw ArgumentError("roc_auc: both classes must be present");
  }
  const double p = static_cast<double>(positives);
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

ClassificationMetrics classification_metrics(std::span<const double> prob,
                                             std::span<const int> label, double threshold) {
  ClassificationMetrics m = confusion_metrics(prob, label, threshold);
  m.roc_auc = roc_auc(prob, label);
  return m;
}

}  // namespace brlstm
