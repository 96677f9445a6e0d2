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

#ifndef BINCP_CONFORMAL_H_
#define BINCP_CONFORMAL_H_

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bincp/certify.h"
#include "bincp/scores.h"

namespace bincp {

inline constexpr double kNegativeInfinity =
    -std::numeric_limits<double>::infinity();

// Index j = floor(alpha (n + 1)) of the conformal quantile (1-based); 0 means
// the calibration set is too small and every label must be accepted.
std::size_t conformal_rank(std::size_t n, double alpha);

// j-th smallest value with j = conformal_rank(n, alpha), or -inf when j = 0.
// A fresh exchangeable value is >= the result with probability >= 1 - alpha.
double conformal_quantile(std::span<const double> values, double alpha);

// A point's score law for exact-probability calibration. survival(tau) is
// Pr[S >= tau]; upper_quantile(p) is the largest tau with survival >= p.
template <class Law>
concept ScoreLaw = requires(const Law& law, double x) {
  { law.survival(x) } -> std::convertible_to<double>;
  { law.upper_quantile(x) } -> std::convertible_to<double>;
};

enum class CalibrationMode { kFixedP, kFixedTau };

std::string to_string(CalibrationMode mode);
CalibrationMode calibration_mode_from_string(const std::string& text);

struct CalibrationConfig {
  double alpha = 0.1;
  double eta = 0.0;
  CalibrationMode mode = CalibrationMode::kFixedTau;
  double p = 0.5;    // used by kFixedP
  double tau = 0.5;  // used by kFixedTau
  SmoothingScheme scheme = SmoothingScheme::Gaussian(0.25);
  ThreatModel ball = ThreatModel::L2(0.0);
  // No Monte-Carlo correction: pass fractions are taken as exact.
  bool exact = false;

  void validate() const;
};

struct CalibrationResult {
  double alpha = 0.0;
  double eta = 0.0;
  CalibrationMode mode = CalibrationMode::kFixedTau;
  bool exact = false;
  SmoothingScheme scheme = SmoothingScheme::Gaussian(0.25);
  ThreatModel ball = ThreatModel::L2(0.0);
  double p_alpha = 0.0;
  double tau_alpha = 0.0;
  double p_alpha_down = 0.0;
  double cert_threshold = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t m = 0;
  // (n + 1) * (alpha - eta) < 1: every label is accepted.
  bool degenerate = false;
  std::vector<std::string> warnings;

  // Per-bound failure probability eta / (n + k); 0 in exact mode.
  double per_test_eta() const;
};

struct PredictionSet {
  std::size_t point = 0;
  std::vector<std::uint32_t> classes;
  std::vector<double> per_class_fraction;
  std::vector<double> per_class_bound;

  bool contains(std::uint32_t y) const {
    return std::binary_search(classes.begin(), classes.end(), y);
  }
};

// --- Vanilla split CP ----------------------------------------------------

// Per-point conformity score for vanilla smooth CP: the mean of the
// true-class samples (the value itself in exact mode).
std::vector<double> smooth_calibration_scores(const ScoreSamples& samples);

// Threshold q_alpha over calibration scores.
double vanilla_threshold(std::span<const double> calibration_scores,
                         double alpha);

// Sets {y : mean score >= threshold} for every test point.
std::vector<PredictionSet> vanilla_predict(double threshold,
                                           const ScoreSamples& test);

// --- BinCP ---------------------------------------------------------------

// Largest tau with pass fraction >= p over `samples`, i.e. the
// ceil(p m)-th largest sample.
double point_threshold(std::span<const float> samples, double p);

// Fixed-p calibration: quantile of per-point thresholds tau_i.
double calibrate_fixed_p(const ScoreSamples& samples, double p, double alpha);

// Fixed-tau calibration: quantile of per-point pass fractions at tau.
double calibrate_fixed_tau(const ScoreSamples& samples, double tau,
                           double alpha);

template <ScoreLaw Law>
double calibrate_fixed_p_exact(std::span<const Law> laws, double p,
                               double alpha) {
  std::vector<double> thresholds;
  thresholds.reserve(laws.size());
  for (const Law& law : laws) thresholds.push_back(law.upper_quantile(p));
  return conformal_quantile(thresholds, alpha);
}

template <ScoreLaw Law>
double calibrate_fixed_tau_exact(std::span<const Law> laws, double tau,
                                 double alpha) {
  std::vector<double> fractions;
  fractions.reserve(laws.size());
  for (const Law& law : laws) fractions.push_back(law.survival(tau));
  return conformal_quantile(fractions, alpha);
}

// Attaches the single certificate c_down[p_alpha_down, ball] to a calibrated
// pair. A negative p_alpha_down (degenerate quantile) maps to threshold 0.
CalibrationResult robustify(double p_alpha, double tau_alpha,
                            double p_alpha_down,
                            const SmoothingScheme& scheme,
                            const ThreatModel& ball);

// Full calibration with finite-sample correction (or none in exact mode),
// followed by robustify().
CalibrationResult corrected_calibrate(const ScoreSamples& samples,
                                      const CalibrationConfig& config);

// Sets {y : upper bound on the pass fraction at tau_alpha >= cert_threshold}.
std::vector<PredictionSet> predict(const CalibrationResult& calibration,
                                   const ScoreSamples& test);

// Reference pipelines that certify every point separately; they return the
// same sets as predict() whenever the round-trip identity holds.
//  * calibration-time: quantile of c_down[q_i] over calibration points, test
//    bound compared directly;
//  * test-time: c_up[bound, B^{-1}] compared with p_alpha_down.
std::vector<PredictionSet> predict_calibration_time(
    const ScoreSamples& calibration_samples, const CalibrationConfig& config,
    const ScoreSamples& test);
std::vector<PredictionSet> predict_test_time(
    const CalibrationResult& calibration, const ScoreSamples& test);

// --- RSCP baseline ---------------------------------------------------------

struct RscpConfig {
  double alpha = 0.1;
  double eta = 0.0;
  double sigma = 0.25;
  double r = 0.0;
  // Hoeffding correction: calibration means lowered and test means raised by
  // hoeffding_bound(m, eta / (n + k)).
  bool hoeffding_correction = false;
};

struct RscpCalibration {
  RscpConfig config;
  double threshold = 0.0;
  double margin = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t m = 0;
};

RscpCalibration rscp_calibrate(const ScoreSamples& samples,
                               const RscpConfig& config);
std::vector<PredictionSet> rscp_predict(const RscpCalibration& calibration,
                                        const ScoreSamples& test);

// Phi(Phi^{-1}(mean) + r / sigma).
double rscp_inflate(double mean, double sigma, double r);

}  // namespace bincp

#endif  // BINCP_CONFORMAL_H_
