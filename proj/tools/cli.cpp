#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "brlstm/checkpoint.hpp"
#include "brlstm/error.hpp"
#include "brlstm/experiments.hpp"

namespace brlstm::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string data;
  std::string synth;
  std::string column = "Close";
  std::string label = "label";
  std::string activations;
  std::string m;
  std::string alpha;
  std::string seed = "1";
  std::string out;
  std::string config;
  std::string optimizer = "adam";
  std::string eval_noise = "stochastic";
  std::string sampling = "collapsed";
  std::string normalize = "full";
  std::size_t lookback = 60;
  std::size_t hidden = 50;
  double split = 0.8;
  double val_split = 0.1;
  int epochs = 50;
  double lr = 1e-3;
  int batch = 32;
  int patience = 5;
  double xmin = -5.0;
  double xmax = 5.0;
  std::size_t points = 201;
  bool raw = false;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) items.push_back(item.substr(b, e - b + 1));
  }
  return items;
}

template <typename T>
T parse_number(const std::string& s, const char* what) {
  std::istringstream in(s);
  T v{};
  in >> v;
  if (!in || !in.eof()) throw ConfigError(std::string("cannot parse ") + what + " '" + s + "'");
  return v;
}

std::vector<int> parse_ints(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const auto& s : split_list(text)) out.push_back(parse_number<int>(s, what));
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(parse_number<double>(s, what));
  return out;
}

void add_data_options(CLI::App* sub, Options& o) {
  sub->add_option("--data", o.data, "Price CSV (Date + value column) or tabular CSV");
  sub->add_option("--synth", o.synth,
                  "Synthetic source: gbm:seed,n,s0,mu,sigma | "
                  "sine:seed,n,s0,mu,sigma,amplitude,period,noise | "
                  "tabular:seed,n,d,positive_rate,signal");
  sub->add_option("--column", o.column, "Value column of a price CSV")->capture_default_str();
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--config", o.config, "JSON file mirroring the flags; flags take precedence");
}

void add_experiment_options(CLI::App* sub, Options& o) {
  add_data_options(sub, o);
  sub->add_option("--label", o.label, "Label column of a tabular CSV")->capture_default_str();
  sub->add_option("--activations", o.activations,
                  "Comma list of relu,leaky_relu,prelu,tanh,gelu,brownian");
  sub->add_option("--m", o.m, "Comma list of Monte Carlo path counts M");
  sub->add_option("--alpha", o.alpha, "Comma list of fixed brownian alphas, or 'learned'");
  sub->add_option("--lookback", o.lookback, "Window length T")->capture_default_str();
  sub->add_option("--split", o.split, "Chronological train fraction")->capture_default_str();
  sub->add_option("--val-split", o.val_split, "Fraction of the training part used for validation")
      ->capture_default_str();
  sub->add_option("--hidden", o.hidden, "LSTM hidden size")->capture_default_str();
  sub->add_option("--epochs", o.epochs, "Maximum epochs")->capture_default_str();
  sub->add_option("--lr", o.lr, "Learning rate")->capture_default_str();
  sub->add_option("--batch", o.batch, "Minibatch size")->capture_default_str();
  sub->add_option("--patience", o.patience, "Early-stopping patience")->capture_default_str();
  sub->add_option("--optimizer", o.optimizer, "sgd | adam")->capture_default_str();
  sub->add_option("--eval-noise", o.eval_noise, "stochastic | mean")->capture_default_str();
  sub->add_option("--sampling", o.sampling, "explicit | collapsed")->capture_default_str();
  sub->add_option("--normalize", o.normalize, "full | train")->capture_default_str();
  sub->add_option("--seed", o.seed, "Comma list of seeds")->capture_default_str();
}

// Appends "--key value" for every config-file entry whose flag is absent.
std::vector<std::string> merge_config_file(std::vector<std::string> args) {
  std::string path;
  for (std::size_t k = 1; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config file " + path + " must hold a JSON object");

  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin() + 1, args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  std::vector<std::string> extra;
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    if (key == "config" || given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
      continue;
    }
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      for (const auto& item : value) {
        if (!text.empty()) text += ',';
        text += item.is_string() ? item.get<std::string>() : item.dump();
      }
    } else {
      text = value.dump();
    }
    extra.push_back(flag);
    extra.push_back(text);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

std::optional<SyntheticSpec> synth_of(const Options& o) {
  if (o.synth.empty()) return std::nullopt;
  return SyntheticSpec::parse(o.synth);
}

ExperimentConfig build_config(const Options& o, const std::vector<ActivationType>& default_acts) {
  ExperimentConfig c;
  if (!o.data.empty()) c.data_path = o.data;
  c.synth = synth_of(o);
  c.column = o.column;
  c.label_column = o.label;
  c.activations.clear();
  for (const auto& name : split_list(o.activations)) {
    c.activations.push_back(parse_activation_type(name));
  }
  if (c.activations.empty()) c.activations = default_acts;
  if (!o.m.empty()) c.paths = parse_ints(o.m, "M");
  if (o.alpha != "learned") c.alphas = parse_doubles(o.alpha, "alpha");
  c.lookback = o.lookback;
  c.split = o.split;
  c.validation_fraction = o.val_split;
  c.hidden = o.hidden;
  if (o.normalize != "full" && o.normalize != "train") {
    throw ConfigError("--normalize must be full or train");
  }
  c.train_only_normalization = o.normalize == "train";
  c.sampling = parse_sampling(o.sampling);
  c.train.max_epochs = o.epochs;
  c.train.learning_rate = o.lr;
  c.train.batch_size = o.batch;
  c.train.patience = o.patience;
  c.train.optimizer = parse_optimizer(o.optimizer);
  c.train.eval_noise = parse_noise_mode(o.eval_noise);
  c.seeds.clear();
  for (const auto& s : split_list(o.seed)) {
    c.seeds.push_back(parse_number<std::uint64_t>(s, "seed"));
  }
  c.out_dir = o.out.empty() ? fs::path("results") : fs::path(o.out);
  c.validate();
  return c;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << body;
}

int cmd_describe(const Options& o, std::ostream& out) {
  if (o.data.empty() == o.synth.empty()) {
    throw ConfigError("describe needs exactly one of --data or --synth");
  }
  std::vector<double> values;
  std::string name;
  if (!o.data.empty()) {
    values = load_csv_prices(o.data, o.column).values;
    name = fs::path(o.data).stem().string();
  } else {
    const auto s = SyntheticSpec::parse(o.synth);
    const auto& a = s.args;
    if (s.kind == "gbm") {
      values = synth_gbm(static_cast<std::uint64_t>(a[0]), static_cast<std::size_t>(a[1]), a[2],
                         a[3], a[4]).values;
    } else if (s.kind == "sine") {
      values = synth_sine_gbm(static_cast<std::uint64_t>(a[0]), static_cast<std::size_t>(a[1]),
                              a[2], a[3], a[4], a[5], a[6], a[7]).values;
    } else {
      throw ConfigError("describe needs a price series (gbm or sine)");
    }
    name = "synthetic_" + s.kind;
  }
  if (!o.raw) values = minmax_normalize(values).values;
  const Description d = describe(values);
  std::string body = "dataset,n,mean,variance\n" + name + "," + std::to_string(values.size()) +
                     "," + format_metric(d.mean) + "," + format_metric(d.variance) + "\n";
  out << body;
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_text(fs::path(o.out) / "describe.csv", body);
  }
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out) {
  const ExperimentConfig c = build_config(o, {ActivationType::brownian});
  const RegressionData data = prepare_regression(c);
  ActivationKind kind{c.activations.front()};
  if (kind.type == ActivationType::brownian) {
    kind = ActivationKind::brownian(c.paths.front(), c.sampling);
  }
  const std::optional<double> alpha =
      c.alphas.empty() ? std::nullopt : std::optional<double>(c.alphas.front());
  const RegressionRun run = run_regression_cell(data, c, kind, alpha, c.seeds.front());

  fs::create_directories(c.out_dir);
  {
    std::ofstream h(c.out_dir / "history.csv", std::ios::binary);
    if (!h) throw DataError("cannot write " + (c.out_dir / "history.csv").string());
    write_history_csv(run.history, h);
  }
  save_checkpoint(run.model, c.out_dir / "model.json");
  std::string preds = "index,target,prediction\n";
  for (std::size_t k = 0; k < data.test.size(); ++k) {
    preds += std::to_string(k) + "," + format_metric(data.test.targets[k]) + "," +
             format_metric(run.test_predictions[k]) + "\n";
  }
  write_text(c.out_dir / "predictions.csv", preds);

  out << "dataset=" << data.name << " activation=" << to_string(kind.type)
      << " epochs=" << run.history.epochs()
      << " epoch_of_convergence=" << run.history.epoch_of_convergence
      << " MSE=" << format_metric(run.mse) << " R2_train=" << format_metric(run.r2_train)
      << " R2_test=" << format_metric(run.r2_test)
      << " alpha=" << format_metric(run.model.params.alpha) << "\n";
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out, const std::string& which) {
  const std::vector<ActivationType> all = {ActivationType::brownian, ActivationType::relu,
                                           ActivationType::leaky_relu, ActivationType::prelu,
                                           ActivationType::tanh, ActivationType::gelu};
  ExperimentConfig c =
      build_config(o, which == "sensitivity" ? std::vector{ActivationType::brownian} : all);
  if (which == "sensitivity" && o.m.empty()) c.paths = kSensitivityPaths;
  ExperimentReport report;
  std::string stem;
  if (which == "sensitivity") {
    report = run_sensitivity(c);
    stem = "sensitivity";
  } else if (which == "compare") {
    report = run_comparison(c);
    stem = "comparison";
  } else {
    report = run_classification(c);
    stem = "classification";
  }
  report.write(c.out_dir, stem);
  out << report.to_csv();
  return kExitOk;
}

int cmd_paths(const Options& o, std::ostream& out) {
  std::vector<double> alphas =
      o.alpha.empty() ? std::vector<double>{0.0, 0.25, 0.5, 1.0} : parse_doubles(o.alpha, "alpha");
  std::vector<int> paths = o.m.empty() ? std::vector<int>{1, 10, 100, 1000} : parse_ints(o.m, "M");
  const auto seeds = split_list(o.seed);
  if (seeds.empty()) throw ConfigError("--seed is required");
  for (int m : paths)
    if (m < 1) throw ConfigError("M values must be >= 1");
  const PathsFigure fig =
      emit_paths_figure(alphas, paths, o.xmin, o.xmax, parse_number<std::uint64_t>(seeds[0], "seed"),
                        o.points, parse_sampling(o.sampling));
  const fs::path dir = o.out.empty() ? fs::path("results") : fs::path(o.out);
  fs::create_directories(dir);
  write_text(dir / "paths.csv", fig.to_csv());
  write_text(dir / "paths.svg", fig.to_svg());
  out << "wrote " << (dir / "paths.csv").string() << " and " << (dir / "paths.svg").string()
      << "\n";
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"BrownianReLU LSTM experiments"};
  app.require_subcommand(1);
  Options o;

  auto* describe_cmd = app.add_subcommand("describe", "Mean and sample variance of a series");
  add_data_options(describe_cmd, o);
  describe_cmd->add_flag("--raw", o.raw, "Skip min-max normalization");

  auto* train_cmd = app.add_subcommand("train", "Train one regression model");
  add_experiment_options(train_cmd, o);
  auto* sens_cmd = app.add_subcommand("sensitivity", "BrownianReLU sweep over M");
  add_experiment_options(sens_cmd, o);
  auto* cmp_cmd = app.add_subcommand("compare", "Compare activations on one pipeline");
  add_experiment_options(cmp_cmd, o);
  auto* cls_cmd = app.add_subcommand("classify", "LSTM classifier per activation");
  add_experiment_options(cls_cmd, o);

  auto* paths_cmd = app.add_subcommand("paths", "Tabulate and plot BrownianReLU curves");
  paths_cmd->add_option("--alpha", o.alpha, "Comma list of alphas");
  paths_cmd->add_option("--m", o.m, "Comma list of path counts M");
  paths_cmd->add_option("--xmin", o.xmin)->capture_default_str();
  paths_cmd->add_option("--xmax", o.xmax)->capture_default_str();
  paths_cmd->add_option("--points", o.points, "Grid points")->capture_default_str();
  paths_cmd->add_option("--sampling", o.sampling, "explicit | collapsed")->capture_default_str();
  paths_cmd->add_option("--seed", o.seed)->capture_default_str();
  paths_cmd->add_option("--out", o.out, "Output directory");
  paths_cmd->add_option("--config", o.config, "JSON file mirroring the flags");

  const std::string prog = raw_args.empty() ? "brlstm" : raw_args.front();
  try {
    std::vector<std::string> args = merge_config_file(raw_args);
    if (args.empty()) args.push_back(prog);
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err << prog << ": error: " << e.what() << "\n" << app.help();
      return kExitUsage;
    }

    if (describe_cmd->parsed()) return cmd_describe(o, out);
    if (train_cmd->parsed()) return cmd_train(o, out);
    if (sens_cmd->parsed()) return cmd_report(o, out, "sensitivity");
    if (cmp_cmd->parsed()) return cmd_report(o, out, "compare");
    if (cls_cmd->parsed()) return cmd_report(o, out, "classify");
    if (paths_cmd->parsed()) return cmd_paths(o, out);
    err << prog << ": error: no subcommand\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << prog << ": error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << prog << ": error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace brlstm::cli
