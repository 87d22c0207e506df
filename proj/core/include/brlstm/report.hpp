#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace brlstm {

/// Empty, text, integer or real table entry.
using Cell = std::variant<std::monostate, std::string, std::int64_t, double>;

/// Column set of sensitivity and comparison reports.
inline const std::vector<std::string> kRegressionColumns = {
    "dataset", "activation", "M", "alpha", "seed",
    "MSE", "R2_train", "R2_test", "epoch_of_convergence"};

/// Column set of classification reports.
inline const std::vector<std::string> kClassificationColumns = {
    "dataset", "activation", "alpha", "seed", "accuracy",
    "precision", "recall", "F1", "ROC_AUC"};

/// A table of experiment results.
///
/// CSV: header row, comma-separated, reals as fixed-point with 6 decimals,
/// empty cells for not-applicable entries.
/// JSON: {"format_version": 1, "kind": ..., "columns": [...], "rows": [[...]]}
/// with reals at full precision, so JSON round-trips exactly.
struct ExperimentReport {
  static constexpr int kFormatVersion = 1;

  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::string to_csv() const;
  std::string to_json() const;
  static ExperimentReport from_json(const std::string& text);

  /// Writes <dir>/<stem>.csv and <dir>/<stem>.json, creating dir if needed.
  void write(const std::filesystem::path& dir, const std::string& stem) const;

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

/// Fixed-point with 6 decimals; "nan"/"inf" for non-finite values.
std::string format_metric(double v);

}  // namespace brlstm
