#include "brlstm/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "brlstm/error.hpp"

namespace brlstm {

using nlohmann::json;

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

struct CsvCell {
  std::string operator()(std::monostate) const { return {}; }
  std::string operator()(const std::string& s) const { return csv_escape(s); }
  std::string operator()(std::int64_t v) const { return std::to_string(v); }
  std::string operator()(double v) const { return format_metric(v); }
};

struct JsonCell {
  json operator()(std::monostate) const { return nullptr; }
  json operator()(const std::string& s) const { return s; }
  json operator()(std::int64_t v) const { return v; }
  json operator()(double v) const { return v; }
};

}  // namespace

std::string format_metric(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string ExperimentReport::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += csv_escape(columns[c]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += std::visit(CsvCell{}, row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string ExperimentReport::to_json() const {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["kind"] = kind;
  doc["columns"] = columns;
  json rs = json::array();
  for (const auto& row : rows) {
    json r = json::array();
    for (const auto& cell : row) r.push_back(std::visit(JsonCell{}, cell));
    rs.push_back(std::move(r));
  }
  doc["rows"] = std::move(rs);
  return doc.dump(1);
}

ExperimentReport ExperimentReport::from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format_version").get<int>() != kFormatVersion) {
      throw DataError("unsupported report format_version");
    }
    ExperimentReport r;
    r.kind = doc.at("kind").get<std::string>();
    r.columns = doc.at("columns").get<std::vector<std::string>>();
    for (const auto& jr : doc.at("rows")) {
      std::vector<Cell> row;
      for (const auto& jc : jr) {
        if (jc.is_null()) row.emplace_back(std::monostate{});
        else if (jc.is_string()) row.emplace_back(jc.get<std::string>());
        else if (jc.is_number_integer()) row.emplace_back(jc.get<std::int64_t>());
        else if (jc.is_number()) row.emplace_back(jc.get<double>());
        else throw DataError("unsupported report cell " + jc.dump());
      }
      r.rows.push_back(std::move(row));
    }
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

void ExperimentReport::write(const std::filesystem::path& dir, const std::string& stem) const {
  std::filesystem::create_directories(dir);
  for (const auto& [ext, body] : {std::pair{".csv", to_csv()}, std::pair{".json", to_json()}}) {
    const auto path = dir / (stem + ext);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << body;
    if (ext == std::string(".json")) out << '\n';
  }
}

}  // namespace brlstm
