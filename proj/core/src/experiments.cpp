#include "brlstm/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "brlstm/error.hpp"
#include "brlstm/metrics.hpp"

namespace brlstm {
namespace {

constexpr std::uint64_t kFinalEvalStream = 0xF1A1;


std::size_t expected_args(const std::string& kind) {
  if (kind == "gbm") return 5;
  if (kind == "sine") return 8;
  if (kind == "tabular") return 5;
  throw ConfigError("unknown synthetic source '" + kind + "' (expected gbm, sine or tabular)");
}

std::string seed_label(std::uint64_t seed) { return std::to_string(seed); }

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Collects per-seed metric columns so a mean row can follow them.
struct SeedAverager {
  std::vector<std::vector<double>> columns;

  void add(const std::vector<double>& values) {
    if (columns.empty()) columns.resize(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) columns[k].push_back(values[k]);
  }
  std::vector<double> means() const {
    std::vector<double> out;
    for (const auto& c : columns) out.push_back(mean_of(c));
    return out;
  }
};

Cell optional_cell(const std::optional<double>& v) {
  return v ? Cell{*v} : Cell{std::monostate{}};
}

std::runtime_error annotate(const std::string& where, const std::exception& e) {
  return TrainingError(where + ": " + e.what());
}

ActivationKind make_kind(ActivationType type, int paths, Sampling sampling) {
  ActivationKind k{type};
  if (type == ActivationType::brownian) k = ActivationKind::brownian(paths, sampling);
  return k;
}

}  // namespace

SyntheticSpec SyntheticSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("synthetic spec '" + std::string(text) + "' must look like kind:a,b,...");
  }
  SyntheticSpec spec;
  spec.kind = std::string(text.substr(0, colon));
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw ConfigError("synthetic spec: cannot parse number '" + std::string(item) + "'");
    }
    spec.args.push_back(v);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (spec.args.size() != expected_args(spec.kind)) {
    throw ConfigError("synthetic spec '" + spec.kind + "' expects " +
                      std::to_string(expected_args(spec.kind)) + " values, got " +
                      std::to_string(spec.args.size()));
  }
  return spec;
}

std::string SyntheticSpec::to_string() const {
  std::string out = kind + ":";
  char buf[32];
  for (std::size_t k = 0; k < args.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", args[k]);
    out += (k ? "," : "") + std::string(buf);
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (!data_path && !synth) throw ConfigError("no data: pass --data PATH or --synth SPEC");
  if (data_path && synth) throw ConfigError("--data and --synth are mutually exclusive");
  if (activations.empty()) throw ConfigError("at least one activation is required");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (paths.empty()) throw ConfigError("the M list must not be empty");
  for (int m : paths)
    if (m < 1) throw ConfigError("M values must be >= 1, got " + std::to_string(m));
  for (double a : alphas)
    if (!std::isfinite(a)) throw ConfigError("alpha values must be finite");
  if (lookback < 1) throw ConfigError("lookback must be >= 1");
  if (!(split > 0.0 && split < 1.0)) throw ConfigError("split must be in (0, 1)");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation fraction must be in (0, 1)");
  }
  if (hidden < 1) throw ConfigError("hidden size must be >= 1");
  train.validate();
}

RegressionData prepare_regression(const ExperimentConfig& config) {
  config.validate();
  RegressionData out;
  PriceSeries series;
  if (config.data_path) {
    series = load_csv_prices(*config.data_path, config.column);
    out.name = config.data_path->stem().string();
  } else {
    const SyntheticSpec& s = *config.synth;
    const auto& a = s.args;
    const auto seed = static_cast<std::uint64_t>(a[0]);
    const auto n = static_cast<std::size_t>(a[1]);
    if (s.kind == "gbm") {
      series = synth_gbm(seed, n, a[2], a[3], a[4]);
    } else if (s.kind == "sine") {
      series = synth_sine_gbm(seed, n, a[2], a[3], a[4], a[5], a[6], a[7]);
    } else {
      throw ConfigError("synthetic source '" + s.kind + "' is not a price series");
    }
    out.name = "synthetic_" + s.kind;
  }

  const std::size_t len = series.values.size();
  if (config.lookback >= len) {
    throw ConfigError("lookback " + std::to_string(config.lookback) +
                      " must be smaller than the series length " + std::to_string(len));
  }
  if (config.train_only_normalization) {
    const std::size_t windows = len - config.lookback;
    const auto cut =
        static_cast<std::size_t>(std::floor(config.split * static_cast<double>(windows)));
    const std::span<const double> seen(series.values.data(), cut + config.lookback);
    const auto [lo, hi] = std::minmax_element(seen.begin(), seen.end());
    out.normalized = minmax_normalize(series.values, *lo, *hi);
  } else {
    out.normalized = minmax_normalize(series.values);
  }

  SequenceDataset windows = make_windows(out.normalized.values, config.lookback);
  windows.norm_min = out.normalized.min;
  windows.norm_max = out.normalized.max;
  auto [train_all, test] = chronological_split(windows, config.split);
  auto [train, validation] = chronological_split(train_all, 1.0 - config.validation_fraction);
  out.train = std::move(train);
  out.validation = std::move(validation);
  out.test = std::move(test);
  return out;
}

ClassificationData prepare_classification(const ExperimentConfig& config) {
  config.validate();
  ClassificationData out;
  TabularDataset table;
  if (config.data_path) {
    table = load_csv_tabular(*config.data_path, config.label_column);
    out.name = config.data_path->stem().string();
  } else {
    const SyntheticSpec& s = *config.synth;
    if (s.kind != "tabular") {
      throw ConfigError("classification needs a tabular source, got '" + s.kind + "'");
    }
    const auto& a = s.args;
    table = synth_tabular(static_cast<std::uint64_t>(a[0]), static_cast<std::size_t>(a[1]),
                          static_cast<std::size_t>(a[2]), a[3], a[4]);
    out.name = "synthetic_tabular";
  }
  const SequenceDataset all = tabular_to_sequences(table);
  auto [train_all, test] = chronological_split(all, config.split);
  auto [train, validation] = chronological_split(train_all, 1.0 - config.validation_fraction);

  auto both_classes = [](const SequenceDataset& d) {
    const auto pos = std::count(d.targets.begin(), d.targets.end(), 1.0);
    return pos > 0 && pos < static_cast<long>(d.size());
  };
  if (!both_classes(train) || !both_classes(test)) {
    throw ConfigError(out.name + ": training and test portions must both contain two classes");
  }
  out.train = std::move(train);
  out.validation = std::move(validation);
  out.test = std::move(test);
  return out;
}

RegressionRun run_regression_cell(const RegressionData& data, const ExperimentConfig& config,
                                  const ActivationKind& activation,
                                  std::optional<double> fixed_alpha, std::uint64_t seed) {
  RegressionRun run;
  run.model.params = init_params(data.train.inputs.front().cols(), config.hidden, 1, seed);
  run.model.activation = activation;
  run.model.head = Head::regression;
  TrainConfig tc = config.train;
  tc.seed = seed;
  tc.loss = LossKind::mse;
  if (fixed_alpha) {
    run.model.params.alpha = *fixed_alpha;
    tc.learn_alpha = false;
  }
  run.history = train(run.model, data.train, data.validation, tc);

  const RngStream eval(seed, kFinalEvalStream);
  const auto train_pred = predict(run.model, data.train, tc.eval_noise, eval.derive(0));
  run.test_predictions = predict(run.model, data.test, tc.eval_noise, eval.derive(1));
  run.r2_train = r2(train_pred, data.train.targets);
  run.r2_test = r2(run.test_predictions, data.test.targets);
  run.mse = mean_squared_error(run.test_predictions, data.test.targets);
  return run;
}

namespace {

// Rows for one (activation, M, alpha setting) group across all seeds.
void regression_group(ExperimentReport& report, const RegressionData& data,
                      const ExperimentConfig& config, const ActivationKind& kind,
                      std::optional<double> fixed_alpha) {
  const bool brownian = kind.type == ActivationType::brownian;
  const Cell m_cell = brownian ? Cell{std::int64_t{kind.paths}} : Cell{std::monostate{}};
  const std::string act(to_string(kind.type));
  SeedAverager avg;
  for (std::uint64_t seed : config.seeds) {
    RegressionRun run;
    try {
      run = run_regression_cell(data, config, kind, fixed_alpha, seed);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw annotate("cell (" + data.name + ", " + act +
                         (brownian ? ", M=" + std::to_string(kind.paths) : "") +
                         ", seed=" + seed_label(seed) + ")",
                     e);
    }
    const std::optional<double> alpha =
        kind.has_alpha() ? std::optional<double>(run.model.params.alpha) : std::nullopt;
    report.rows.push_back({data.name, act, m_cell, optional_cell(alpha), seed_label(seed),
                           run.mse, run.r2_train, run.r2_test,
                           std::int64_t{run.history.epoch_of_convergence}});
    avg.add({alpha.value_or(0.0), run.mse, run.r2_train, run.r2_test,
             static_cast<double>(run.history.epoch_of_convergence)});
  }
  if (config.seeds.size() > 1) {
    const auto m = avg.means();
    report.rows.push_back({data.name, act, m_cell,
                           kind.has_alpha() ? Cell{m[0]} : Cell{std::monostate{}},
                           std::string("mean"), m[1], m[2], m[3], m[4]});
  }
}

std::vector<std::optional<double>> alpha_settings(const ExperimentConfig& config,
                                                  ActivationType type) {
  if (type != ActivationType::brownian || config.alphas.empty()) return {std::nullopt};
  return {config.alphas.begin(), config.alphas.end()};
}

}  // namespace

ExperimentReport run_sensitivity(const ExperimentConfig& config) {
  config.validate();
  if (std::find(config.activations.begin(), config.activations.end(),
                ActivationType::brownian) == config.activations.end()) {
    throw ConfigError("sensitivity analysis requires the brownian activation");
  }
  const RegressionData data = prepare_regression(config);
  ExperimentReport report{"sensitivity", kRegressionColumns, {}};
  for (int m : config.paths) {
    for (const auto& alpha : alpha_settings(config, ActivationType::brownian)) {
      regression_group(report, data, config,
                       ActivationKind::brownian(m, config.sampling), alpha);
    }
  }
  return report;
}

ExperimentReport run_comparison(const ExperimentConfig& config) {
  config.validate();
  const int m = config.paths.front();
  const RegressionData data = prepare_regression(config);
  ExperimentReport report{"comparison", kRegressionColumns, {}};
  for (ActivationType type : config.activations) {
    for (const auto& alpha : alpha_settings(config, type)) {
      regression_group(report, data, config, make_kind(type, m, config.sampling), alpha);
    }
  }
  return report;
}

ExperimentReport run_classification(const ExperimentConfig& config) {
  config.validate();
  const int m = config.paths.front();
  const ClassificationData data = prepare_classification(config);
  std::vector<int> test_labels;
  for (double t : data.test.targets) test_labels.push_back(static_cast<int>(t));

  ExperimentReport report{"classification", kClassificationColumns, {}};
  for (ActivationType type : config.activations) {
    const ActivationKind kind = make_kind(type, m, config.sampling);
    const std::string act(to_string(type));
    for (const auto& fixed_alpha : alpha_settings(config, type)) {
      SeedAverager avg;
      for (std::uint64_t seed : config.seeds) {
        ClassificationMetrics cm;
        Model model;
        try {
          model.params = init_params(1, config.hidden, 1, seed);
          model.activation = kind;
          model.head = Head::classification;
          TrainConfig tc = config.train;
          tc.seed = seed;
          tc.loss = LossKind::bce;
          if (fixed_alpha) {
            model.params.alpha = *fixed_alpha;
            tc.learn_alpha = false;
          }
          train(model, data.train, data.validation, tc);
          const auto prob = predict(model, data.test, tc.eval_noise,
                                    RngStream(seed, kFinalEvalStream).derive(1));
          cm = classification_metrics(prob, test_labels);
        } catch (const ConfigError&) {
          throw;
        } catch (const std::exception& e) {
          throw annotate("cell (" + data.name + ", " + act + ", seed=" + seed_label(seed) + ")",
                         e);
        }
        const std::optional<double> alpha =
            kind.has_alpha() ? std::optional<double>(model.params.alpha) : std::nullopt;
        report.rows.push_back({data.name, act, optional_cell(alpha), seed_label(seed),
                               cm.accuracy, cm.precision, cm.recall, cm.f1, cm.roc_auc});
        avg.add({alpha.value_or(0.0), cm.accuracy, cm.precision, cm.recall, cm.f1, cm.roc_auc});
      }
      if (config.seeds.size() > 1) {
        const auto mn = avg.means();
        report.rows.push_back({data.name, act,
                               kind.has_alpha() ? Cell{mn[0]} : Cell{std::monostate{}},
                               std::string("mean"), mn[1], mn[2], mn[3], mn[4], mn[5]});
      }
    }
  }
  return report;
}

}  // namespace brlstm
