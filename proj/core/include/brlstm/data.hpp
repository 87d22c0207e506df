#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "brlstm/matrix.hpp"

namespace brlstm {

/// Dated closing prices. Timestamps are ISO-8601 dates, strictly increasing.
struct PriceSeries {
  std::vector<std::string> timestamps;
  std::vector<double> values;
};

/// Sliding-window samples: inputs[i] is T x d, targets[i] the next value.
struct SequenceDataset {
  std::vector<Matrix> inputs;
  std::vector<double> targets;
  double norm_min = 0.0;
  double norm_max = 1.0;

  std::size_t size() const noexcept { return targets.size(); }
  bool empty() const noexcept { return targets.empty(); }
};

/// Standardized feature rows with binary labels.
struct TabularDataset {
  Matrix features;  // N x d
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  /// Original label text for 0 and 1.
  std::pair<std::string, std::string> label_names;
  std::size_t dropped_rows = 0;

  std::size_t size() const noexcept { return labels.size(); }
};

struct Normalized {
  std::vector<double> values;
  double min = 0.0;
  double max = 1.0;
};

struct Description {
  double mean = 0.0;
  double variance = 0.0;
};

/// Reads a price CSV with a "Date" column (YYYY-MM-DD...) and `column`.
PriceSeries load_csv_prices(const std::filesystem::path& path,
                            const std::string& column = "Close");

/// v -> (v - min) / (max - min) using the series' own range.
Normalized minmax_normalize(std::span<const double> values);

/// Same map with a caller-supplied range (e.g. training-portion statistics).
Normalized minmax_normalize(std::span<const double> values, double min, double max);

std::vector<double> minmax_denormalize(std::span<const double> normalized, double min,
                                       double max);

/// Sample i: inputs = values[i .. i+T-1] (T x 1), target = values[i+T].
SequenceDataset make_windows(std::span<const double> values, std::size_t lookback);

/// First floor(ratio * N) samples train, the rest test. No shuffling.
std::pair<SequenceDataset, SequenceDataset> chronological_split(const SequenceDataset& data,
                                                                double ratio);

/// Mean and sample variance (divisor N - 1).
Description describe(std::span<const double> values);

/// Geometric Brownian motion with daily step 1/252; n values S_0..S_{n-1}.
PriceSeries synth_gbm(std::uint64_t seed, std::size_t n, double s0, double mu, double sigma);

/// GBM trend plus amplitude * sin(2 pi k / period) plus N(0, noise^2) observation noise.
PriceSeries synth_sine_gbm(std::uint64_t seed, std::size_t n, double s0, double mu, double sigma,
                           double amplitude, double period, double noise);

/// Reads a CSV of numeric features plus one binary label column; rows with
/// empty or NA fields are dropped and counted. Features are z-scored.
TabularDataset load_csv_tabular(const std::filesystem::path& path,
                                const std::string& label_column);

/// Synthetic imbalanced binary dataset: labels ~ Bernoulli(positive_rate),
/// features N(shift * label, 1) with shift = `signal` on the first half of
/// the columns. Features are left unstandardized (unit noise scale).
TabularDataset synth_tabular(std::uint64_t seed, std::size_t n, std::size_t d,
                             double positive_rate, double signal);

/// Row r becomes a d x 1 sequence (one feature per timestep), target = label.
SequenceDataset tabular_to_sequences(const TabularDataset& data);

/// Writes a price CSV (Date,<column>) that load_csv_prices reads back.
void write_csv_prices(const PriceSeries& series, const std::filesystem::path& path,
                      const std::string& column = "Close");

}  // namespace brlstm
