#include "brlstm/data.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>

#include "brlstm/error.hpp"
#include "brlstm/rng.hpp"

namespace brlstm {
namespace {

constexpr double kTradingDaysPerYear = 252.0;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Splits one CSV record; double quotes may wrap a field containing commas.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        field += '"';
        ++k;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(trim(field));
      field.clear();
    } else {
      field += ch;
    }
  }
  out.push_back(trim(field));
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool is_iso_date(const std::string& s) {
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t k : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (s[k] < '0' || s[k] > '9') return false;
  }
  const int y = std::stoi(s.substr(0, 4));
  const unsigned m = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
  const unsigned d = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
  if (!std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                   std::chrono::day{d}}
           .ok()) {
    return false;
  }
  return s.size() == 10 || s[10] == 'T' || s[10] == ' ';
}

bool is_missing(const std::string& s) {
  return s.empty() || s == "NA" || s == "N/A" || s == "NaN" || s == "nan" || s == "null";
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

std::ifstream open_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::vector<std::string> read_header(std::ifstream& in, const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  return split_csv(line);
}

std::string iso_date(std::size_t day_offset) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{year{2000} / January / 1} + days{day_offset}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace

PriceSeries load_csv_prices(const std::filesystem::path& path, const std::string& column) {
  std::ifstream in = open_csv(path);
  const auto header = read_header(in, path);
  const auto date_it = std::find(header.begin(), header.end(), "Date");
  const auto value_it = std::find(header.begin(), header.end(), column);
  if (date_it == header.end()) {
    throw DataError(path.string() + ": column 'Date' not found; available: " + join(header));
  }
  if (value_it == header.end()) {
    throw DataError(path.string() + ": column '" + column + "' not found; available: " +
                    join(header));
  }
  const auto date_col = static_cast<std::size_t>(date_it - header.begin());
  const auto value_col = static_cast<std::size_t>(value_it - header.begin());

  PriceSeries series;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    if (fields.size() <= std::max(date_col, value_col)) {
      throw DataError(where + "expected at least " +
                      std::to_string(std::max(date_col, value_col) + 1) + " fields");
    }
    const std::string& date = fields[date_col];
    if (!is_iso_date(date)) throw DataError(where + "invalid date '" + date + "'");
    const auto value = parse_double(fields[value_col]);
    if (!value || !std::isfinite(*value) || *value <= 0.0) {
      throw DataError(where + "invalid " + column + " value '" + fields[value_col] + "'");
    }
    if (!series.timestamps.empty() && !(series.timestamps.back() < date)) {
      throw DataError(where + "date " + date + " is not after previous date " +
                      series.timestamps.back());
    }
    series.timestamps.push_back(date);
    series.values.push_back(*value);
  }
  if (series.values.empty()) throw DataError(path.string() + ": no data rows");
  return series;
}

void write_csv_prices(const PriceSeries& series, const std::filesystem::path& path,
                      const std::string& column) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "Date," << column << '\n';
  char buf[32];
  for (std::size_t k = 0; k < series.values.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", series.values[k]);
    out << series.timestamps[k] << ',' << buf << '\n';
  }
}

Normalized minmax_normalize(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("minmax_normalize: empty series");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return minmax_normalize(values, *lo, *hi);
}

Normalized minmax_normalize(std::span<const double> values, double min, double max) {
  if (!(max > min)) {
    throw ArgumentError("minmax_normalize: degenerate range (max == min == " +
                        std::to_string(min) + ")");
  }
  Normalized out{std::vector<double>(values.size()), min, max};
  const double range = max - min;
  for (std::size_t k = 0; k < values.size(); ++k) out.values[k] = (values[k] - min) / range;
  return out;
}

std::vector<double> minmax_denormalize(std::span<const double> normalized, double min,
                                       double max) {
  std::vector<double> out(normalized.size());
  for (std::size_t k = 0; k < normalized.size(); ++k) {
    out[k] = normalized[k] * (max - min) + min;
  }
  return out;
}

SequenceDataset make_windows(std::span<const double> values, std::size_t lookback) {
  if (lookback == 0) throw ArgumentError("make_windows: lookback must be >= 1");
  if (lookback >= values.size()) {
    throw ArgumentError("make_windows: lookback " + std::to_string(lookback) +
                        " must be smaller than the series length " +
                        std::to_string(values.size()));
  }
  SequenceDataset ds;
  const std::size_t n = values.size() - lookback;
  ds.inputs.reserve(n);
  ds.targets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ds.inputs.push_back(Matrix::column(values.subspan(i, lookback)));
    ds.targets.push_back(values[i + lookback]);
  }
  return ds;
}

std::pair<SequenceDataset, SequenceDataset> chronological_split(const SequenceDataset& data,
                                                                double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ArgumentError("chronological_split: ratio must be in (0, 1), got " +
                        std::to_string(ratio));
  }
  const auto cut = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(data.size())));
  if (cut == 0 || cut == data.size()) {
    throw ArgumentError("chronological_split: ratio " + std::to_string(ratio) + " on " +
                        std::to_string(data.size()) + " samples leaves one side empty");
  }
  SequenceDataset train, test;
  train.norm_min = test.norm_min = data.norm_min;
  train.norm_max = test.norm_max = data.norm_max;
  const auto mid = static_cast<std::ptrdiff_t>(cut);
  train.inputs.assign(data.inputs.begin(), data.inputs.begin() + mid);
  train.targets.assign(data.targets.begin(), data.targets.begin() + mid);
  test.inputs.assign(data.inputs.begin() + mid, data.inputs.end());
  test.targets.assign(data.targets.begin() + mid, data.targets.end());
  return {std::move(train), std::move(test)};
}

Description describe(std::span<const double> values) {
  if (values.size() < 2) throw ArgumentError("describe: need at least 2 values");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, ss / static_cast<double>(values.size() - 1)};
}

PriceSeries synth_gbm(std::uint64_t seed, std::size_t n, double s0, double mu, double sigma) {
  if (n < 2) throw ArgumentError("synth_gbm: n must be >= 2");
  if (!(s0 > 0.0) || !std::isfinite(s0)) throw ArgumentError("synth_gbm: s0 must be > 0");
  if (!(sigma >= 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
    throw ArgumentError("synth_gbm: mu must be finite and sigma >= 0");
  }
  const double dt = 1.0 / kTradingDaysPerYear;
  const double drift = (mu - 0.5 * sigma * sigma) * dt;
  const double vol = sigma * std::sqrt(dt);
  RngStream rng(seed, 0x6B6D);
  PriceSeries s;
  s.values.resize(n);
  s.timestamps.resize(n);
  double log_s = std::log(s0);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) log_s += drift + gaussian(rng, 0.0, vol);
    s.values[k] = k == 0 ? s0 : std::exp(log_s);
    s.timestamps[k] = iso_date(k);
  }
  return s;
}

PriceSeries synth_sine_gbm(std::uint64_t seed, std::size_t n, double s0, double mu, double sigma,
                           double amplitude, double period, double noise) {
  if (!(period > 0.0)) throw ArgumentError("synth_sine_gbm: period must be > 0");
  if (!(noise >= 0.0)) throw ArgumentError("synth_sine_gbm: noise must be >= 0");
  PriceSeries s = synth_gbm(seed, n, s0, mu, sigma);
  RngStream rng(seed, 0x5E1E);
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  for (std::size_t k = 0; k < n; ++k) {
    s.values[k] += amplitude * std::sin(kTwoPi * static_cast<double>(k) / period) +
                   gaussian(rng, 0.0, noise);
    if (!(s.values[k] > 0.0)) {
      throw ArgumentError("synth_sine_gbm: series went non-positive; increase s0");
    }
  }
  return s;
}

TabularDataset load_csv_tabular(const std::filesystem::path& path,
                                const std::string& label_column) {
  std::ifstream in = open_csv(path);
  const auto header = read_header(in, path);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw DataError(path.string() + ": label column '" + label_column +
                    "' not found; available: " + join(header));
  }
  const auto label_col = static_cast<std::size_t>(label_it - header.begin());

  TabularDataset ds;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != label_col) ds.feature_names.push_back(header[c]);
  const std::size_t d = ds.feature_names.size();
  if (d == 0) throw DataError(path.string() + ": no feature columns");

  std::vector<double> rows;
  std::vector<std::string> raw_labels;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    if (fields.size() != header.size()) {
      throw DataError(where + "expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    if (std::any_of(fields.begin(), fields.end(), is_missing)) {
      ++ds.dropped_rows;
      continue;
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_col) continue;
      const auto v = parse_double(fields[c]);
      if (!v || !std::isfinite(*v)) {
        throw DataError(where + "non-numeric feature '" + header[c] + "' value '" + fields[c] +
                        "'");
      }
      rows.push_back(*v);
    }
    raw_labels.push_back(fields[label_col]);
  }
  if (raw_labels.empty()) throw DataError(path.string() + ": no complete data rows");

  std::vector<std::string> classes(raw_labels);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() > 2) {
    throw DataError(path.string() + ": label column '" + label_column + "' has " +
                    std::to_string(classes.size()) + " classes; expected a binary label");
  }
  // Numeric 0/1 labels keep their meaning; otherwise classes map in sorted order.
  std::map<std::string, int> code;
  const bool numeric01 = std::all_of(classes.begin(), classes.end(), [](const std::string& s) {
    const auto v = parse_double(s);
    return v && (*v == 0.0 || *v == 1.0);
  });
  for (std::size_t k = 0; k < classes.size(); ++k) {
    code[classes[k]] = numeric01 ? static_cast<int>(*parse_double(classes[k])) : static_cast<int>(k);
  }
  for (const auto& [name, c] : code) (c == 0 ? ds.label_names.first : ds.label_names.second) = name;
  for (const auto& l : raw_labels) ds.labels.push_back(code[l]);

  const std::size_t n = raw_labels.size();
  ds.features = Matrix(n, d, std::move(rows));
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += ds.features(r, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double z = ds.features(r, c) - mean;
      var += z * z;
    }
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    for (std::size_t r = 0; r < n; ++r) {
      ds.features(r, c) = sd > 0.0 ? (ds.features(r, c) - mean) / sd : 0.0;
    }
  }
  return ds;
}

TabularDataset synth_tabular(std::uint64_t seed, std::size_t n, std::size_t d,
                             double positive_rate, double signal) {
  if (n < 2 || d == 0) throw ArgumentError("synth_tabular: need n >= 2 and d >= 1");
  if (!(positive_rate > 0.0 && positive_rate < 1.0)) {
    throw ArgumentError("synth_tabular: positive_rate must be in (0, 1)");
  }
  RngStream rng(seed, 0x7AB);
  TabularDataset ds;
  ds.features = Matrix(n, d);
  ds.labels.resize(n);
  ds.label_names = {"0", "1"};
  for (std::size_t c = 0; c < d; ++c) ds.feature_names.push_back("x" + std::to_string(c));
  for (std::size_t r = 0; r < n; ++r) {
    ds.labels[r] = rng.uniform() < positive_rate ? 1 : 0;
    for (std::size_t c = 0; c < d; ++c) {
      const double shift = (c < (d + 1) / 2 && ds.labels[r] == 1) ? signal : 0.0;
      ds.features(r, c) = shift + rng.standard_normal();
    }
  }
  return ds;
}

SequenceDataset tabular_to_sequences(const TabularDataset& data) {
  SequenceDataset ds;
  const std::size_t d = data.features.cols();
  ds.inputs.reserve(data.size());
  for (std::size_t r = 0; r < data.size(); ++r) {
    Matrix seq(d, 1);
    for (std::size_t c = 0; c < d; ++c) seq[c] = data.features(r, c);
    ds.inputs.push_back(std::move(seq));
    ds.targets.push_back(static_cast<double>(data.labels[r]));
  }
  return ds;
}

}  // namespace brlstm
