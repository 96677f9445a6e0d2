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

#include "bincp/score_io.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bincp/error.h"
#include "json.hpp"

namespace bincp {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

template <typename T>
void AppendLittleEndian(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(bytes), std::end(bytes));
  }
  out.append(bytes, sizeof(T));
}

template <typename T>
T ReadLittleEndian(std::string_view data, std::size_t offset) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, data.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(bytes), std::end(bytes));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return buffer.str();
}

void WriteFile(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::uint64_t ParseIndex(std::string_view field, std::size_t line_no) {
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ValidationError("line " + std::to_string(line_no) +
                          ": invalid index '" + std::string(field) + "'");
  }
  return value;
}

float ParseScore(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ValidationError("line " + std::to_string(line_no) +
                          ": invalid score '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw ValidationError("line " + std::to_string(line_no) +
                          ": non-finite score value");
  }
  return static_cast<float>(value);
}

void ExpectHeader(std::string_view line, std::string_view expected,
                  const fs::path& path) {
  if (line != expected) {
    throw ValidationError(path.string() + ": expected header '" +
                          std::string(expected) + "'");
  }
}

std::vector<std::uint32_t> LoadLabelsCsv(const fs::path& path,
                                         std::size_t n_points) {
  const std::string text = ReadFile(path);
  const auto lines = SplitLines(text);
  if (lines.empty()) throw ValidationError(path.string() + ": empty file");
  ExpectHeader(lines.front(), "point,label", path);
  std::vector<std::uint32_t> labels(n_points);
  std::vector<bool> seen(n_points, false);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = SplitFields(lines[i]);
    if (fields.size() != 2) {
      throw ValidationError("line " + std::to_string(i + 1) +
                            ": expected 2 fields");
    }
    const std::uint64_t point = ParseIndex(fields[0], i + 1);
    const std::uint64_t label = ParseIndex(fields[1], i + 1);
    if (point >= n_points) throw ValidationError("label for unknown point");
    if (seen[point]) throw ValidationError("duplicate label for a point");
    if (label > UINT32_MAX) throw ValidationError("label out of range");
    seen[point] = true;
    labels[point] = static_cast<std::uint32_t>(label);
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ValidationError("labels file does not cover every point");
  }
  return labels;
}

ScoreSamples LoadCsv(const fs::path& path,
                     const std::optional<fs::path>& labels_path,
                     bool exact_mode) {
  const std::string text = ReadFile(path);
  const auto lines = SplitLines(text);
  if (lines.empty()) throw ValidationError(path.string() + ": empty file");
  ExpectHeader(lines.front(), "point,class,sample,score", path);

  struct Row {
    std::uint64_t point, cls, sample;
    float score;
  };
  std::vector<Row> rows;
  rows.reserve(lines.size() - 1);
  std::uint64_t n = 0, k = 0, m = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = SplitFields(lines[i]);
    if (fields.size() != 4) {
      throw ValidationError("line " + std::to_string(i + 1) +
                            ": expected 4 fields");
    }
    Row row{ParseIndex(fields[0], i + 1), ParseIndex(fields[1], i + 1),
            ParseIndex(fields[2], i + 1), ParseScore(fields[3], i + 1)};
    n = std::max(n, row.point + 1);
    k = std::max(k, row.cls + 1);
    m = std::max(m, row.sample + 1);
    rows.push_back(row);
  }
  if (rows.empty()) throw ValidationError(path.string() + ": no score rows");
  if (rows.size() != n * k * m) throw ValidationError("payload length mismatch");

  std::vector<float> values(rows.size());
  std::vector<bool> seen(rows.size(), false);
  for (const Row& row : rows) {
    const std::size_t index = (row.point * k + row.cls) * m + row.sample;
    if (seen[index]) throw ValidationError("duplicate score row");
    seen[index] = true;
    values[index] = row.score;
  }

  std::optional<std::vector<std::uint32_t>> labels;
  if (labels_path) {
    labels = LoadLabelsCsv(*labels_path, n);
  }
  return ScoreSamples(n, k, m, std::move(values), std::move(labels),
                      exact_mode);
}

ScoreSamples LoadBin(const fs::path& path) {
  const std::string data = ReadFile(path);
  constexpr std::size_t kPrefix = 4 + 2 + 4;
  if (data.size() < kPrefix || std::memcmp(data.data(), kBinMagic, 4) != 0) {
    throw ValidationError(path.string() + ": not a BNCP file");
  }
  const auto version = ReadLittleEndian<std::uint16_t>(data, 4);
  if (version != kBinVersion) {
    throw ValidationError("unsupported BNCP version " +
                          std::to_string(version));
  }
  const auto header_len = ReadLittleEndian<std::uint32_t>(data, 6);
  if (data.size() < kPrefix + header_len) {
    throw ValidationError("payload length mismatch");
  }
  json header;
  try {
    header = json::parse(data.substr(kPrefix, header_len));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed BNCP header: ") + e.what());
  }
  std::size_t n = 0, k = 0, m = 0;
  bool exact_mode = false, has_labels = false;
  try {
    n = header.at("n_points").get<std::size_t>();
    k = header.at("n_classes").get<std::size_t>();
    m = header.at("m_samples").get<std::size_t>();
    exact_mode = header.at("exact_mode").get<bool>();
    has_labels = header.at("has_labels").get<bool>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed BNCP header: ") + e.what());
  }
  if (exact_mode && m != 1) {
    throw ValidationError("exact mode requires one sample");
  }
  const std::size_t count = n * k * m;
  const std::size_t expected = kPrefix + header_len + count * sizeof(float) +
                               (has_labels ? n * sizeof(std::uint32_t) : 0);
  if (data.size() != expected) throw ValidationError("payload length mismatch");

  std::size_t offset = kPrefix + header_len;
  std::vector<float> values(count);
  for (std::size_t i = 0; i < count; ++i, offset += sizeof(float)) {
    values[i] = ReadLittleEndian<float>(data, offset);
  }
  std::optional<std::vector<std::uint32_t>> labels;
  if (has_labels) {
    labels.emplace(n);
    for (std::size_t i = 0; i < n; ++i, offset += sizeof(std::uint32_t)) {
      (*labels)[i] = ReadLittleEndian<std::uint32_t>(data, offset);
    }
  }
  return ScoreSamples(n, k, m, std::move(values), std::move(labels),
                      exact_mode);
}

std::string FormatFloat(float value) {
  char buffer[32];
  const auto [ptr, ec] =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

}  // namespace

ScoreFormat format_from_path(const fs::path& path) {
  return path.extension() == ".bin" ? ScoreFormat::kBin : ScoreFormat::kCsv;
}

fs::path default_labels_path(const fs::path& path) {
  return path.parent_path() / "labels.csv";
}

ScoreSamples load_score_samples(const fs::path& path, ScoreFormat format,
                                const std::optional<fs::path>& labels_path,
                                bool exact_mode) {
  if (format == ScoreFormat::kBin) {
    ScoreSamples samples = LoadBin(path);
    if (exact_mode && !samples.exact_mode()) {
      throw ValidationError("file is not flagged as exact mode");
    }
    return samples;
  }
  return LoadCsv(path, labels_path, exact_mode);
}

void save_score_samples(const ScoreSamples& samples, const fs::path& path,
                        ScoreFormat format,
                        const std::optional<fs::path>& labels_path) {
  if (format == ScoreFormat::kBin) {
    const json header = {{"n_points", samples.n_points()},
                         {"n_classes", samples.n_classes()},
                         {"m_samples", samples.m_samples()},
                         {"exact_mode", samples.exact_mode()},
                         {"has_labels", samples.has_labels()}};
    const std::string header_text = header.dump();
    std::string out(kBinMagic, 4);
    AppendLittleEndian<std::uint16_t>(out, kBinVersion);
    AppendLittleEndian<std::uint32_t>(
        out, static_cast<std::uint32_t>(header_text.size()));
    out += header_text;
    for (float v : samples.values()) AppendLittleEndian<float>(out, v);
    for (std::uint32_t y : samples.labels()) {
      AppendLittleEndian<std::uint32_t>(out, y);
    }
    WriteFile(path, out);
    return;
  }

  std::string out = "point,class,sample,score\n";
  const std::size_t m = samples.m_samples();
  for (std::size_t i = 0; i < samples.n_points(); ++i) {
    for (std::size_t y = 0; y < samples.n_classes(); ++y) {
      const auto row = samples.samples(i, y);
      for (std::size_t j = 0; j < m; ++j) {
        out += std::to_string(i) + ',' + std::to_string(y) + ',' +
               std::to_string(j) + ',' + FormatFloat(row[j]) + '\n';
      }
    }
  }
  WriteFile(path, out);
  if (samples.has_labels()) {
    std::string labels = "point,label\n";
    for (std::size_t i = 0; i < samples.n_points(); ++i) {
      labels += std::to_string(i) + ',' + std::to_string(samples.label(i)) +
                '\n';
    }
    WriteFile(labels_path.value_or(default_labels_path(path)), labels);
  }
}

}  // namespace bincp
