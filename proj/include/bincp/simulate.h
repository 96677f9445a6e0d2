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

#ifndef BINCP_SIMULATE_H_
#define BINCP_SIMULATE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bincp/certify.h"
#include "bincp/conformal.h"
#include "bincp/rng.h"
#include "bincp/scores.h"

namespace bincp {

// Law of the smoothed score of one (point, class) pair: either a Bernoulli
// pass indicator with values {1, 0} or a Beta(c p, c (1 - p)) continuous
// score with mean p.
class PointLaw {
 public:
  static PointLaw Bernoulli(double p);
  static PointLaw Beta(double mean, double concentration);

  bool continuous() const { return continuous_; }
  double mean() const { return mean_; }
  // Pr[S >= tau].
  double survival(double tau) const;
  // Largest tau with survival(tau) >= p.
  double upper_quantile(double p) const;
  float sample(CounterRng& rng) const;

 private:
  PointLaw(bool continuous, double mean, double concentration)
      : continuous_(continuous), mean_(mean), concentration_(concentration) {}

  bool continuous_;
  double mean_;
  double concentration_;
};

static_assert(ScoreLaw<PointLaw>);

struct GeneratorSpec {
  std::size_t n_points = 100;  // calibration points
  std::size_t n_test = 100;
  std::size_t n_classes = 10;
  std::size_t m_samples = 200;
  // True-class mean p_i ~ Beta(beta_a, beta_b).
  double beta_a = 6.0;
  double beta_b = 2.0;
  // Off-class means ~ U(0, p_i * off_class_scale).
  double off_class_scale = 0.5;
  std::uint64_t seed = 0;
  bool continuous = false;
  double concentration = 10.0;
  // Overrides the Beta draw of every true-class mean.
  std::optional<double> fixed_true_probability;

  void validate() const;
};

// Per (point, class) statistic of a set of points: pass probabilities at
// some tau, or score means.
struct ExactProbabilities {
  std::size_t n_points = 0;
  std::size_t n_classes = 0;
  std::vector<double> values;  // point-major
  std::vector<std::uint32_t> labels;

  double at(std::size_t point, std::size_t cls) const {
    return values[point * n_classes + cls];
  }
  double& at(std::size_t point, std::size_t cls) {
    return values[point * n_classes + cls];
  }
};

// Laws of the calibration points followed by the test points.
struct SyntheticLaws {
  std::size_t n_cal = 0;
  std::size_t n_test = 0;
  std::size_t n_classes = 0;
  std::vector<PointLaw> laws;  // (n_cal + n_test) x n_classes
  std::vector<std::uint32_t> labels;

  const PointLaw& law(std::size_t point, std::size_t cls) const {
    return laws[point * n_classes + cls];
  }
  // Laws of the true classes of the calibration points.
  std::vector<PointLaw> calibration_true_laws() const;
  // survival(tau) over points [begin, end).
  ExactProbabilities pass_probabilities(double tau, std::size_t begin,
                                        std::size_t end) const;
  ExactProbabilities means(std::size_t begin, std::size_t end) const;
};

SyntheticLaws generate_laws(const GeneratorSpec& spec, std::uint64_t trial);

// Monte-Carlo tensor of points [begin, end), with labels.
ScoreSamples sample_scores(const SyntheticLaws& laws, std::size_t begin,
                           std::size_t end, std::size_t m,
                           const StreamKey& key);

struct SyntheticData {
  SyntheticLaws laws;
  ScoreSamples calibration;
  ScoreSamples test;
};

// Calibration and test tensors drawn i.i.d. from the same law; identical
// spec and trial give identical tensors.
SyntheticData generate(const GeneratorSpec& spec, std::uint64_t trial = 0);

enum class AdversaryMode { kNone, kWorstCase };

std::string to_string(AdversaryMode mode);
AdversaryMode adversary_mode_from_string(const std::string& text);

struct AdversaryOracle {
  SmoothingScheme scheme = SmoothingScheme::Gaussian(0.25);
  ThreatModel ball = ThreatModel::L2(0.0);
  AdversaryMode mode = AdversaryMode::kNone;
};

// Moves every true-class probability to c_down[p, B] and every other class
// to c_up[p, B^{-1}]; identity for kNone.
ExactProbabilities attack(const ExactProbabilities& clean,
                          const AdversaryOracle& oracle);

// Exact-mode tensor (m = 1) holding `probs` as values.
ScoreSamples exact_scores(const ExactProbabilities& probs);

// m pass/fail samples per pair: `pass_value` with the given probability,
// else `fail_value`.
ScoreSamples bernoulli_scores(const ExactProbabilities& probs, std::size_t m,
                              float pass_value, float fail_value,
                              const StreamKey& key);

enum class PipelineMode { kVanilla, kBinCp, kBinCpRobust, kRscp };

std::string to_string(PipelineMode mode);
PipelineMode pipeline_mode_from_string(const std::string& text);

struct EvalConfig {
  GeneratorSpec generator;
  PipelineMode pipeline = PipelineMode::kBinCpRobust;
  AdversaryMode adversary = AdversaryMode::kNone;
  // alpha, eta, exact, calibration mode and the scheme / ball shared by the
  // pipeline and the adversary.
  CalibrationConfig calibration;
  std::size_t trials = 1;
  std::size_t threads = 1;

  void validate() const;
};

struct TrialResult {
  std::size_t trial = 0;
  double coverage = 0.0;
  double set_size = 0.0;
  double calibration_seconds = 0.0;
  double prediction_seconds = 0.0;
  // Threshold the test bounds are compared with.
  double threshold = 0.0;
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for one trial
  double min = 0.0;
  double max = 0.0;
  double se = 0.0;
};

MetricSummary summarize(const std::vector<double>& values);

struct Report {
  std::vector<TrialResult> trials;  // sorted by trial index
  MetricSummary coverage;
  MetricSummary set_size;
  MetricSummary calibration_seconds;
  MetricSummary prediction_seconds;
};

// One trial: fresh laws, calibration, optional attack, prediction.
TrialResult run_trial(const EvalConfig& config, std::uint64_t trial);

// Runs config.trials trials on up to config.threads workers. Errors are
// rethrown with the trial index prepended.
Report evaluate(const EvalConfig& config);

}  // namespace bincp

#endif  // BINCP_SIMULATE_H_
