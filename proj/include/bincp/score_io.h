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

#ifndef BINCP_SCORE_IO_H_
#define BINCP_SCORE_IO_H_

#include <filesystem>
#include <optional>

#include "bincp/scores.h"

namespace bincp {

// BIN layout:
//   "BNCP" | u16 version (=1) | u32 header length | UTF-8 JSON header
//   {n_points, n_classes, m_samples, exact_mode, has_labels}
//   | float32 values (point, class, sample order) | uint32 labels if any
// All integers and floats little-endian.
//
// CSV layout: header `point,class,sample,score`, one row per sample, plus an
// optional sidecar with header `point,label`.
enum class ScoreFormat { kCsv, kBin };

inline constexpr char kBinMagic[4] = {'B', 'N', 'C', 'P'};
inline constexpr std::uint16_t kBinVersion = 1;

// Picks BIN for a ".bin" extension and CSV otherwise.
ScoreFormat format_from_path(const std::filesystem::path& path);

ScoreSamples load_score_samples(
    const std::filesystem::path& path, ScoreFormat format,
    const std::optional<std::filesystem::path>& labels_path = std::nullopt,
    bool exact_mode = false);

// Writes `samples`. For CSV the labels (when present) go to labels_path,
// which defaults to "labels.csv" next to `path`.
void save_score_samples(
    const ScoreSamples& samples, const std::filesystem::path& path,
    ScoreFormat format,
    const std::optional<std::filesystem::path>& labels_path = std::nullopt);

// Default sidecar location for a CSV tensor.
std::filesystem::path default_labels_path(const std::filesystem::path& path);

}  // namespace bincp

#endif  // BINCP_SCORE_IO_H_
