#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brlstm/activation.hpp"
#include "brlstm/data.hpp"
#include "brlstm/report.hpp"
#include "brlstm/training.hpp"

namespace brlstm {

/// Synthetic data source, written "<kind>:a,b,c,..." on the command line.
///   gbm:seed,n,s0,mu,sigma
///   sine:seed,n,s0,mu,sigma,amplitude,period,noise   (GBM trend plus noisy sine)
///   tabular:seed,n,d,positive_rate,signal
struct SyntheticSpec {
  std::string kind;
  std::vector<double> args;

  static SyntheticSpec parse(std::string_view text);
  std::string to_string() const;
};

/// Path counts swept by the sensitivity runner when none are given.
inline const std::vector<int> kSensitivityPaths = {500, 1000, 1500};

struct ExperimentConfig {
  std::optional<std::filesystem::path> data_path;
  std::optional<SyntheticSpec> synth;
  std::string column = "Close";
  std::string label_column = "label";
  std::vector<ActivationType> activations = {ActivationType::brownian};
  /// Monte Carlo path counts. Sensitivity sweeps all of them; the other
  /// runners use the first.
  std::vector<int> paths = {1000};
  /// Fixed alpha values for brownian rows; empty means alpha is learned.
  std::vector<double> alphas;
  std::size_t lookback = 60;
  double split = 0.8;
  /// Tail fraction of the training portion held out for early stopping.
  double validation_fraction = 0.1;
  std::size_t hidden = 50;
  /// Normalize with min/max of the training portion only.
  bool train_only_normalization = false;
  Sampling sampling = Sampling::collapsed;
  TrainConfig train;
  std::vector<std::uint64_t> seeds = {1};
  std::filesystem::path out_dir = ".";

  /// Throws ConfigError when no data source is set or a list is invalid.
  void validate() const;
};

/// Normalized, windowed and split regression data.
struct RegressionData {
  std::string name;
  Normalized normalized;
  SequenceDataset train, validation, test;
};

RegressionData prepare_regression(const ExperimentConfig& config);

struct ClassificationData {
  std::string name;
  SequenceDataset train, validation, test;
};

ClassificationData prepare_classification(const ExperimentConfig& config);

/// Trained model, its history and the regression metrics of one cell.
struct RegressionRun {
  Model model;
  TrainHistory history;
  double mse = 0.0;
  double r2_train = 0.0;
  double r2_test = 0.0;
  std::vector<double> test_predictions;
};

/// Trains one model. Initial weights depend only on (seed, hidden size), so
/// runs that differ only in activation start from identical weights.
RegressionRun run_regression_cell(const RegressionData& data, const ExperimentConfig& config,
                                  const ActivationKind& activation,
                                  std::optional<double> fixed_alpha, std::uint64_t seed);

/// One brownian model per (M, seed), reported as MSE, R2 and convergence epoch.
ExperimentReport run_sensitivity(const ExperimentConfig& config);

/// One model per (activation, seed) on an identical pipeline.
ExperimentReport run_comparison(const ExperimentConfig& config);

/// LSTM classifier per activation, with brownian expanded per fixed alpha.
ExperimentReport run_classification(const ExperimentConfig& config);

/// Grid of BrownianReLU outputs for each (alpha, M) curve.
struct PathsFigure {
  std::vector<double> alphas;
  std::vector<int> paths;
  std::vector<double> x;
  /// values[a * paths.size() + m][k] = f(x[k]) for alphas[a], paths[m].
  std::vector<std::vector<double>> values;

  /// Long format: header "alpha,M,x,f".
  std::string to_csv() const;
  std::string to_svg() const;
};

/// Curves with the same M share their noise, so alpha only rescales them.
PathsFigure emit_paths_figure(const std::vector<double>& alphas, const std::vector<int>& paths,
                              double xmin, double xmax, std::uint64_t seed,
                              std::size_t points = 201, Sampling sampling = Sampling::collapsed);

}  // namespace brlstm
