#pragma once

#include <span>

namespace brlstm {

struct RegressionMetrics {
  double mse = 0.0;
  double r2_train = 0.0;
  double r2_test = 0.0;
};

struct ClassificationMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double roc_auc = 0.5;
};

double mean_squared_error(std::span<const double> pred, std::span<const double> target);

/// 1 - SS_res / SS_tot. Negative when worse than predicting the mean.
/// Throws ArgumentError on length mismatch, fewer than 2 points or a constant target.
double r2(std::span<const double> pred, std::span<const double> target);

struct ConfusionCounts {
  long tp = 0, fp = 0, tn = 0, fn = 0;
};

ConfusionCounts confusion_counts(std::span<const double> prob, std::span<const int> label,
                                 double threshold = 0.5);

/// Accuracy, precision, recall and F1 of prob >= threshold. Zero denominators
/// give 0. roc_auc is left at its default.
ClassificationMetrics confusion_metrics(std::span<const double> prob, std::span<const int> label,
                                        double threshold = 0.5);

/// Mann-Whitney estimate of P(score_pos > score_neg), ties counted 1/2.
/// Throws ArgumentError unless both classes are present.
double roc_auc(std::span<const double> score, std::span<const int> label);

/// confusion_metrics plus roc_auc.
ClassificationMetrics classification_metrics(std::span<const double> prob,
                                             std::span<const int> label,
                                             double threshold = 0.5);

}  // namespace brlstm
