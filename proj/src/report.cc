//
// Copyright 2026 The BinCP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "bincp/report.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bincp/error.h"

namespace bincp {
namespace {

using nlohmann::json;

std::string CsvCell(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) {
    return std::to_string(*i);
  }
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  const std::string& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

json SummaryJson(const MetricSummary& s) {
  return {{"mean", json_number(s.mean)}, {"std", json_number(s.std)},
          {"min", json_number(s.min)},   {"max", json_number(s.max)},
          {"se", json_number(s.se)}};
}

const json& Field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  return doc.at(key);
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*g", kReportDigits, value);
  return buf;
}

double round_significant(double value) {
  if (!std::isfinite(value)) return value;
  return std::strtod(format_double(value).c_str(), nullptr);
}

json json_number(double value) {
  if (std::isfinite(value)) return round_significant(value);
  return format_double(value);
}

double number_from_json(const json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ValidationError("expected a number, got " + value.dump());
}

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << CsvCell(row[c]);
    }
    out << '\n';
  }
}

Table trials_table(const Report& report) {
  Table table;
  table.columns = {"trial",          "coverage",
                   "set_size",       "calibration_seconds",
                   "prediction_seconds", "threshold"};
  for (const TrialResult& r : report.trials) {
    table.rows.push_back({static_cast<std::int64_t>(r.trial), r.coverage,
                          r.set_size, r.calibration_seconds,
                          r.prediction_seconds, r.threshold});
  }
  return table;
}

Table summary_table(const Report& report) {
  Table table;
  table.columns = {"metric", "mean", "std", "min", "max", "se"};
  auto add = [&](const char* name, const MetricSummary& s) {
    table.rows.push_back({std::string(name), s.mean, s.std, s.min, s.max, s.se});
  };
  add("coverage", report.coverage);
  add("set_size", report.set_size);
  add("calibration_seconds", report.calibration_seconds);
  add("prediction_seconds", report.prediction_seconds);
  return table;
}

json report_json(const Report& report, const json& config) {
  json trials = json::array();
  for (const TrialResult& r : report.trials) {
    trials.push_back({{"trial", r.trial},
                      {"coverage", json_number(r.coverage)},
                      {"set_size", json_number(r.set_size)},
                      {"calibration_seconds", json_number(r.calibration_seconds)},
                      {"prediction_seconds", json_number(r.prediction_seconds)},
                      {"threshold", json_number(r.threshold)}});
  }
  return {{"config", config},
          {"summary",
           {{"coverage", SummaryJson(report.coverage)},
            {"set_size", SummaryJson(report.set_size)},
            {"calibration_seconds", SummaryJson(report.calibration_seconds)},
            {"prediction_seconds", SummaryJson(report.prediction_seconds)}}},
          {"trials", trials}};
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void emit_report(const Report& report, ReportFormat format,
                 const std::filesystem::path& path, const json& config) {
  std::ostringstream text;
  if (format == ReportFormat::kCsv) {
    write_csv(trials_table(report), text);
  } else {
    text << report_json(report, config).dump(2) << '\n';
  }
  write_text_file(path, text.str());
}

json scheme_to_json(const SmoothingScheme& scheme) {
  switch (scheme.kind()) {
    case SmoothingScheme::Kind::kGaussian:
      return {{"kind", "gaussian"}, {"sigma", scheme.sigma()}};
    case SmoothingScheme::Kind::kUniform:
      return {{"kind", "uniform"},
              {"lambda", scheme.lambda()},
              {"exact", scheme.exact()}};
    case SmoothingScheme::Kind::kSparse:
      break;
  }
  return {{"kind", "sparse"},
          {"p_plus", scheme.p_plus()},
          {"p_minus", scheme.p_minus()}};
}

SmoothingScheme scheme_from_json(const json& doc) {
  const std::string kind = Field(doc, "kind").get<std::string>();
  if (kind == "gaussian") {
    return SmoothingScheme::Gaussian(Field(doc, "sigma").get<double>());
  }
  if (kind == "uniform") {
    return SmoothingScheme::Uniform(Field(doc, "lambda").get<double>(),
                                    doc.value("exact", false));
  }
  if (kind == "sparse") {
    return SmoothingScheme::SparseBernoulli(
        Field(doc, "p_plus").get<double>(), Field(doc, "p_minus").get<double>());
  }
  throw ValidationError("unknown smoothing scheme '" + kind + "'");
}

json ball_to_json(const ThreatModel& ball) {
  switch (ball.kind()) {
    case ThreatModel::Kind::kL2:
      return {{"kind", "l2"}, {"r", ball.radius()}};
    case ThreatModel::Kind::kL1:
      return {{"kind", "l1"}, {"r", ball.radius()}};
    case ThreatModel::Kind::kBinaryFlip:
      break;
  }
  return {{"kind", "binary-flip"}, {"r_add", ball.r_add()},
          {"r_del", ball.r_del()}};
}

ThreatModel ball_from_json(const json& doc) {
  const std::string kind = Field(doc, "kind").get<std::string>();
  if (kind == "l2") return ThreatModel::L2(Field(doc, "r").get<double>());
  if (kind == "l1") return ThreatModel::L1(Field(doc, "r").get<double>());
  if (kind == "binary-flip") {
    return ThreatModel::BinaryFlip(Field(doc, "r_add").get<std::uint32_t>(),
                                   Field(doc, "r_del").get<std::uint32_t>());
  }
  throw ValidationError("unknown threat model '" + kind + "'");
}

json calibration_to_json(const CalibrationResult& r) {
  auto full = [](double v) -> json {
    if (std::isfinite(v)) return v;
    return format_double(v);
  };
  return {{"alpha", r.alpha},
          {"eta", r.eta},
          {"mode", to_string(r.mode)},
          {"exact", r.exact},
          {"p_alpha", full(r.p_alpha)},
          {"tau_alpha", full(r.tau_alpha)},
          {"p_alpha_down", full(r.p_alpha_down)},
          {"cert_threshold", full(r.cert_threshold)},
          {"scheme", scheme_to_json(r.scheme)},
          {"ball", ball_to_json(r.ball)},
          {"n", r.n},
          {"k", r.k},
          {"m", r.m},
          {"degenerate", r.degenerate},
          {"warnings", r.warnings}};
}

CalibrationResult calibration_from_json(const json& doc) {
  try {
    CalibrationResult r;
    r.alpha = Field(doc, "alpha").get<double>();
    r.eta = Field(doc, "eta").get<double>();
    r.mode = calibration_mode_from_string(Field(doc, "mode").get<std::string>());
    r.exact = doc.value("exact", false);
    r.p_alpha = number_from_json(Field(doc, "p_alpha"));
    r.tau_alpha = number_from_json(Field(doc, "tau_alpha"));
    r.p_alpha_down = number_from_json(Field(doc, "p_alpha_down"));
    r.cert_threshold = number_from_json(Field(doc, "cert_threshold"));
    r.scheme = scheme_from_json(Field(doc, "scheme"));
    r.ball = ball_from_json(Field(doc, "ball"));
    r.n = Field(doc, "n").get<std::size_t>();
    r.k = Field(doc, "k").get<std::size_t>();
    r.m = Field(doc, "m").get<std::size_t>();
    r.degenerate = doc.value("degenerate", false);
    if (doc.contains("warnings")) {
      r.warnings = doc.at("warnings").get<std::vector<std::string>>();
    }
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed calibration file: ") +
                          e.what());
  }
}

}  // namespace bincp
