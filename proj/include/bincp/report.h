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

#ifndef BINCP_REPORT_H_
#define BINCP_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "bincp/conformal.h"
#include "bincp/simulate.h"

namespace bincp {

// Printed precision of every report float.
inline constexpr int kReportDigits = 9;

// %.9g, with "inf" / "-inf" / "nan" for non-finite values.
std::string format_double(double value);

// value rounded to kReportDigits significant digits.
double round_significant(double value);

// Finite values as rounded numbers, non-finite ones as strings, so that the
// document stays valid JSON.
nlohmann::json json_number(double value);
double number_from_json(const nlohmann::json& value);

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

void write_csv(const Table& table, std::ostream& out);

// Per-trial rows: trial, coverage, set_size, calibration_seconds,
// prediction_seconds, threshold.
Table trials_table(const Report& report);

// One row per metric: metric, mean, std, min, max, se.
Table summary_table(const Report& report);

nlohmann::json report_json(const Report& report, const nlohmann::json& config);

enum class ReportFormat { kCsv, kJson };

// CSV writes the per-trial table; JSON writes config, summary and trials
// with sorted keys. Throws IoError when the file cannot be written.
void emit_report(const Report& report, ReportFormat format,
                 const std::filesystem::path& path,
                 const nlohmann::json& config = nlohmann::json::object());

void write_text_file(const std::filesystem::path& path,
                     const std::string& text);

// CalibrationResult <-> JSON at full double precision.
nlohmann::json calibration_to_json(const CalibrationResult& result);
CalibrationResult calibration_from_json(const nlohmann::json& doc);

nlohmann::json scheme_to_json(const SmoothingScheme& scheme);
SmoothingScheme scheme_from_json(const nlohmann::json& doc);
nlohmann::json ball_to_json(const ThreatModel& ball);
ThreatModel ball_from_json(const nlohmann::json& doc);

}  // namespace bincp

#endif  // BINCP_REPORT_H_
