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

#include "bincp/scores.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "bincp/error.h"
#include "bincp/rng.h"

namespace bincp {
namespace {

constexpr std::uint64_t kApsTieTag = 0x41505354;  // "APST"

void CheckClass(std::size_t y, std::size_t k) {
  if (y >= k) {
    throw ValidationError("class index " + std::to_string(y) +
                          " out of range for " + std::to_string(k) +
                          " classes");
  }
}

}  // namespace

ProbVector::ProbVector(std::vector<double> probs, bool softmax)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw ValidationError("probability vector is empty");
  double total = 0.0;
  for (double p : probs_) {
    if (std::isnan(p) || p < 0.0 || p > 1.0) {
      throw ValidationError("probability entries must lie in [0, 1]");
    }
    total += p;
  }
  if (softmax && std::fabs(total - 1.0) > kSoftmaxSumTolerance) {
    throw ValidationError("softmax probabilities must sum to 1");
  }
}

double score(const ScoreFunction& fn, const ProbVector& probs, std::size_t y,
             double u) {
  CheckClass(y, probs.size());
  switch (fn.kind) {
    case ScoreKind::kTps:
      return probs[y];
    case ScoreKind::kAps: {
      if (std::isnan(u) || u < 0.0 || u > 1.0) {
        throw ValidationError("APS tie-break u must lie in [0, 1]");
      }
      const double py = probs[y];
      double rho = 0.0;
      for (double pc : probs.values()) {
        if (pc > py) rho += pc;
      }
      return -(rho + u * py);
    }
    case ScoreKind::kLogit:
      throw ValidationError("LOGIT scores take raw logits, not probabilities");
  }
  return 0.0;
}

double score_logits(const ScoreFunction& fn, std::span<const double> logits,
                    std::size_t y) {
  CheckClass(y, logits.size());
  if (fn.kind == ScoreKind::kAps) {
    throw ValidationError("APS applied to non-probability input");
  }
  if (fn.kind == ScoreKind::kTps) {
    throw ValidationError("TPS applied to non-probability input");
  }
  if (!std::isfinite(logits[y])) throw ValidationError("logit is not finite");
  return logits[y];
}

double aps_tie_break(std::uint64_t seed, std::size_t point, std::size_t cls) {
  CounterRng rng(StreamKey{.seed = seed,
                           .trial = 0,
                           .point = point,
                           .cls = cls,
                           .tag = kApsTieTag});
  return rng.uniform();
}

ScoreSamples::ScoreSamples(std::size_t n_points, std::size_t n_classes,
                           std::size_t m_samples, std::vector<float> values,
                           std::optional<std::vector<std::uint32_t>> labels,
                           bool exact_mode)
    : n_points_(n_points),
      n_classes_(n_classes),
      m_samples_(m_samples),
      values_(std::move(values)),
      labels_(std::move(labels)),
      exact_mode_(exact_mode) {
  if (n_classes_ == 0) throw ValidationError("n_classes must be >= 1");
  if (m_samples_ == 0) throw ValidationError("m_samples must be >= 1");
  if (exact_mode_ && m_samples_ != 1) {
    throw ValidationError("exact mode requires one sample");
  }
  if (values_.size() != n_points_ * n_classes_ * m_samples_) {
    throw ValidationError("payload length mismatch");
  }
  for (float v : values_) {
    if (!std::isfinite(v)) throw ValidationError("non-finite score value");
    if (exact_mode_ && (v < 0.0f || v > 1.0f)) {
      throw ValidationError("exact-mode values must be probabilities");
    }
  }
  if (labels_) {
    if (labels_->size() != n_points_) {
      throw ValidationError("label count does not match n_points");
    }
    for (std::uint32_t y : *labels_) {
      if (y >= n_classes_) throw ValidationError("label out of range");
    }
  }
}

std::span<const float> ScoreSamples::samples(std::size_t point,
                                             std::size_t cls) const {
  if (point >= n_points_ || cls >= n_classes_) {
    throw ValidationError("sample index out of range");
  }
  return std::span<const float>(values_).subspan(
      (point * n_classes_ + cls) * m_samples_, m_samples_);
}

std::uint32_t ScoreSamples::label(std::size_t point) const {
  if (!labels_) throw ValidationError("labels required for calibration");
  if (point >= n_points_) throw ValidationError("point index out of range");
  return (*labels_)[point];
}

std::span<const std::uint32_t> ScoreSamples::labels() const {
  if (!labels_) return {};
  return *labels_;
}

ScoreSamples ScoreSamples::subset(std::span<const std::size_t> points) const {
  const std::size_t block = n_classes_ * m_samples_;
  std::vector<float> values;
  values.reserve(points.size() * block);
  std::optional<std::vector<std::uint32_t>> labels;
  if (labels_) labels.emplace().reserve(points.size());
  for (std::size_t p : points) {
    if (p >= n_points_) throw ValidationError("point index out of range");
    const auto first = values_.begin() + static_cast<std::ptrdiff_t>(p * block);
    values.insert(values.end(), first,
                  first + static_cast<std::ptrdiff_t>(block));
    if (labels) labels->push_back((*labels_)[p]);
  }
  return ScoreSamples(points.size(), n_classes_, m_samples_, std::move(values),
                      std::move(labels), exact_mode_);
}

std::size_t count_passing(const ScoreSamples& samples, std::size_t point,
                          std::size_t cls, double tau) {
  const auto row = samples.samples(point, cls);
  return static_cast<std::size_t>(std::count_if(
      row.begin(), row.end(),
      [tau](float s) { return static_cast<double>(s) >= tau; }));
}

double binarize(const ScoreSamples& samples, std::size_t point,
                std::size_t cls, double tau) {
  return static_cast<double>(count_passing(samples, point, cls, tau)) /
         static_cast<double>(samples.m_samples());
}

double mean_score(const ScoreSamples& samples, std::size_t point,
                  std::size_t cls) {
  const auto row = samples.samples(point, cls);
  double total = 0.0;
  for (float s : row) total += s;
  return total / static_cast<double>(row.size());
}

ScoreSamples score_probability_samples(
    const ScoreFunction& fn,
    std::span<const std::vector<ProbVector>> per_point,
    std::optional<std::vector<std::uint32_t>> labels) {
  if (per_point.empty() || per_point.front().empty()) {
    throw ValidationError("no probability samples to score");
  }
  const std::size_t m = per_point.front().size();
  const std::size_t k = per_point.front().front().size();
  std::vector<float> values;
  values.reserve(per_point.size() * k * m);
  for (std::size_t i = 0; i < per_point.size(); ++i) {
    if (per_point[i].size() != m) {
      throw ValidationError("every point needs the same number of samples");
    }
    for (std::size_t y = 0; y < k; ++y) {
      const double u = fn.kind == ScoreKind::kAps
                           ? aps_tie_break(fn.aps_tie_seed.value_or(0), i, y)
                           : 0.0;
      for (const ProbVector& probs : per_point[i]) {
        if (probs.size() != k) throw ValidationError("dimension mismatch");
        values.push_back(static_cast<float>(score(fn, probs, y, u)));
      }
    }
  }
  return ScoreSamples(per_point.size(), k, m, std::move(values),
                      std::move(labels));
}

}  // namespace bincp
