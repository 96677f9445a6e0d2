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

#ifndef BINCP_SCORES_H_
#define BINCP_SCORES_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bincp {

// Class-probability vector pi(x). Entries lie in [0, 1]; softmax outputs must
// also sum to one within kSoftmaxSumTolerance.
class ProbVector {
 public:
  static constexpr double kSoftmaxSumTolerance = 1e-6;

  explicit ProbVector(std::vector<double> probs, bool softmax = true);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> values() const { return probs_; }

 private:
  std::vector<double> probs_;
};

enum class ScoreKind { kTps, kAps, kLogit };

struct ScoreFunction {
  ScoreKind kind = ScoreKind::kTps;
  // Seed of the APS tie-break stream; see aps_tie_break().
  std::optional<std::uint64_t> aps_tie_seed;
};

// Conformity score of class y. TPS returns probs[y]; APS returns
// -(rho + u * probs[y]) where rho is the mass of strictly more likely
// classes. LOGIT is rejected here, use score_logits().
double score(const ScoreFunction& fn, const ProbVector& probs, std::size_t y,
             double u = 0.0);

// Raw-logit scoring. Only ScoreKind::kLogit is accepted.
double score_logits(const ScoreFunction& fn, std::span<const double> logits,
                    std::size_t y);

// APS tie-break variable for (point, class). Drawn once per pair and held
// fixed across all Monte-Carlo samples of that point.
double aps_tie_break(std::uint64_t seed, std::size_t point, std::size_t cls);

// Monte-Carlo conformity score samples, shape points x classes x samples,
// stored point-major / class-major / sample-minor. Immutable once built.
class ScoreSamples {
 public:
  ScoreSamples(std::size_t n_points, std::size_t n_classes,
               std::size_t m_samples, std::vector<float> values,
               std::optional<std::vector<std::uint32_t>> labels = std::nullopt,
               bool exact_mode = false);

  std::size_t n_points() const { return n_points_; }
  std::size_t n_classes() const { return n_classes_; }
  std::size_t m_samples() const { return m_samples_; }
  bool exact_mode() const { return exact_mode_; }
  bool has_labels() const { return labels_.has_value(); }

  std::span<const float> samples(std::size_t point, std::size_t cls) const;
  std::uint32_t label(std::size_t point) const;
  std::span<const std::uint32_t> labels() const;
  std::span<const float> values() const { return values_; }

  // Copy of the listed points, in the given order.
  ScoreSamples subset(std::span<const std::size_t> points) const;

  friend bool operator==(const ScoreSamples&, const ScoreSamples&) = default;

 private:
  std::size_t n_points_;
  std::size_t n_classes_;
  std::size_t m_samples_;
  std::vector<float> values_;
  std::optional<std::vector<std::uint32_t>> labels_;
  bool exact_mode_;
};

// Number of samples of (point, cls) that are >= tau.
std::size_t count_passing(const ScoreSamples& samples, std::size_t point,
                          std::size_t cls, double tau);

// Empirical pass fraction (#samples >= tau) / m.
double binarize(const ScoreSamples& samples, std::size_t point,
                std::size_t cls, double tau);

// Mean of the samples of (point, cls).
double mean_score(const ScoreSamples& samples, std::size_t point,
                  std::size_t cls);

// Scores a batch of noisy probability vectors into a ScoreSamples tensor.
// per_point[i][j] is the j-th smoothing sample of point i; every point needs
// the same number of samples. LOGIT is not accepted (use raw logits).
ScoreSamples score_probability_samples(
    const ScoreFunction& fn,
    std::span<const std::vector<ProbVector>> per_point,
    std::optional<std::vector<std::uint32_t>> labels = std::nullopt);

}  // namespace bincp

#endif  // BINCP_SCORES_H_
