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

#include "bincp/conformal.h"

#include <cmath>
#include <numeric>
#include <optional>

#include "bincp/error.h"
#include "bincp/intervals.h"
#include "bincp/numeric.h"

namespace bincp {
namespace {

// Slack for products such as alpha * (n + 1) or p * m that are meant to land
// on an integer but may be off by a few ulps.
constexpr double kIndexSlack = 1e-9;

void CheckAlpha(double alpha) {
  if (std::isnan(alpha) || alpha <= 0.0 || alpha >= 1.0) {
    throw ValidationError("alpha must lie in (0, 1)");
  }
}

void RequireLabels(const ScoreSamples& samples) {
  if (!samples.has_labels()) {
    throw ValidationError("labels required for calibration");
  }
  if (samples.n_points() == 0) throw ValidationError("empty calibration set");
}

// ceil(p m) clamped to [1, m].
std::size_t CeilCount(double p, std::size_t m) {
  const double x = p * static_cast<double>(m);
  const double c = std::ceil(x - kIndexSlack);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(c, 1.0)), 1,
                                 m);
}

// Pass statistic of (point, cls) at tau: the stored probability for
// exact-mode tensors, the binarized fraction otherwise.
double PassFraction(const ScoreSamples& samples, std::size_t point,
                    std::size_t cls, double tau) {
  if (samples.exact_mode()) return samples.samples(point, cls)[0];
  return binarize(samples, point, cls, tau);
}

void CheckTestShape(const ScoreSamples& test, std::size_t k) {
  if (test.n_classes() != k) {
    throw ValidationError("class-count mismatch: calibrated with " +
                          std::to_string(k) + " classes, test has " +
                          std::to_string(test.n_classes()));
  }
}

struct Calibrated {
  CalibrationResult result;
  // Per calibration point statistic whose quantile gives p_alpha_down
  // (fixed-tau), or p_alpha_down repeated (fixed-p).
  std::vector<double> lower_stats;
  double level = 0.0;
};

Calibrated CalibrateUncertified(const ScoreSamples& samples,
                                const CalibrationConfig& config) {
  config.validate();
  RequireLabels(samples);
  if (samples.exact_mode() && !config.exact) {
    throw ValidationError(
        "exact-mode scores require exact calibration (eta = 0)");
  }
  const std::size_t n = samples.n_points();
  const std::size_t k = samples.n_classes();
  const std::size_t m = samples.m_samples();
  const double level = config.exact ? config.alpha : config.alpha - config.eta;
  const double per_test_eta =
      config.exact ? 0.0 : config.eta / static_cast<double>(n + k);

  Calibrated out;
  out.level = level;
  CalibrationResult& r = out.result;
  r.alpha = config.alpha;
  r.eta = config.eta;
  r.mode = config.mode;
  r.exact = config.exact;
  r.scheme = config.scheme;
  r.ball = config.ball;
  r.n = n;
  r.k = k;
  r.m = m;
  r.degenerate = conformal_rank(n, level) == 0;

  if (config.mode == CalibrationMode::kFixedTau) {
    std::vector<double> fractions(n);
    for (std::size_t i = 0; i < n; ++i) {
      fractions[i] = PassFraction(samples, i, samples.label(i), config.tau);
    }
    r.tau_alpha = config.tau;
    r.p_alpha = conformal_quantile(fractions, config.alpha);
    if (config.exact) {
      out.lower_stats = fractions;
    } else {
      const ClopperPearsonTable table(m, per_test_eta);
      out.lower_stats.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        out.lower_stats[i] = table.lower(
            count_passing(samples, i, samples.label(i), config.tau));
      }
    }
    r.p_alpha_down = conformal_quantile(out.lower_stats, level);
  } else {
    if (samples.exact_mode()) {
      throw ValidationError("fixed-p calibration needs sampled scores");
    }
    const std::size_t count = CeilCount(config.p, m);
    const double snapped = static_cast<double>(count) / static_cast<double>(m);
    std::vector<double> thresholds(n);
    for (std::size_t i = 0; i < n; ++i) {
      thresholds[i] = point_threshold(samples.samples(i, samples.label(i)),
                                      snapped);
    }
    r.tau_alpha = conformal_quantile(thresholds, level);
    r.p_alpha = snapped;
    r.p_alpha_down =
        config.exact ? snapped : cp_lower(count, m, per_test_eta);
    out.lower_stats.assign(n, r.p_alpha_down);
  }

  if (r.degenerate) {
    r.warnings.push_back(
        "calibration set too small for alpha: (n + 1) * alpha < 1, every "
        "label is accepted");
    if (config.mode == CalibrationMode::kFixedTau) {
      r.p_alpha = std::max(r.p_alpha, 0.0);
      r.p_alpha_down = 0.0;
    }
  }
  return out;
}

}  // namespace

std::size_t conformal_rank(std::size_t n, double alpha) {
  CheckAlpha(alpha);
  const double j = std::floor(alpha * static_cast<double>(n + 1) + kIndexSlack);
  return std::min(static_cast<std::size_t>(std::max(j, 0.0)), n);
}

double conformal_quantile(std::span<const double> values, double alpha) {
  if (values.empty()) throw ValidationError("empty calibration set");
  const std::size_t j = conformal_rank(values.size(), alpha);
  if (j == 0) return kNegativeInfinity;
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted) {
    if (std::isnan(v)) throw ValidationError("NaN calibration score");
  }
  std::nth_element(sorted.begin(),
                   sorted.begin() + static_cast<std::ptrdiff_t>(j - 1),
                   sorted.end());
  return sorted[j - 1];
}

std::string to_string(CalibrationMode mode) {
  return mode == CalibrationMode::kFixedP ? "fixed-p" : "fixed-tau";
}

CalibrationMode calibration_mode_from_string(const std::string& text) {
  if (text == "fixed-p") return CalibrationMode::kFixedP;
  if (text == "fixed-tau") return CalibrationMode::kFixedTau;
  throw ValidationError("unknown calibration mode '" + text + "'");
}

void CalibrationConfig::validate() const {
  CheckAlpha(alpha);
  if (exact) {
    if (eta != 0.0) throw ValidationError("exact mode requires eta = 0");
  } else if (std::isnan(eta) || eta <= 0.0 || eta >= alpha) {
    throw ValidationError("eta must lie in (0, alpha) without exact mode");
  }
  if (mode == CalibrationMode::kFixedP &&
      (std::isnan(p) || p <= 0.0 || p >= 1.0)) {
    throw ValidationError("fixed-p calibration needs p in (0, 1)");
  }
  if (mode == CalibrationMode::kFixedTau && std::isnan(tau)) {
    throw ValidationError("tau is NaN");
  }
  check_compatible(scheme, ball);
}

double CalibrationResult::per_test_eta() const {
  return exact ? 0.0 : eta / static_cast<double>(n + k);
}

std::vector<double> smooth_calibration_scores(const ScoreSamples& samples) {
  RequireLabels(samples);
  std::vector<double> scores(samples.n_points());
  for (std::size_t i = 0; i < samples.n_points(); ++i) {
    scores[i] = mean_score(samples, i, samples.label(i));
  }
  return scores;
}

double vanilla_threshold(std::span<const double> calibration_scores,
                         double alpha) {
  return conformal_quantile(calibration_scores, alpha);
}

std::vector<PredictionSet> vanilla_predict(double threshold,
                                           const ScoreSamples& test) {
  std::vector<PredictionSet> sets(test.n_points());
  for (std::size_t i = 0; i < test.n_points(); ++i) {
    PredictionSet& set = sets[i];
    set.point = i;
    for (std::size_t y = 0; y < test.n_classes(); ++y) {
      const double s = mean_score(test, i, y);
      set.per_class_fraction.push_back(s);
      set.per_class_bound.push_back(s);
      if (s >= threshold) set.classes.push_back(static_cast<std::uint32_t>(y));
    }
  }
  return sets;
}

double point_threshold(std::span<const float> samples, double p) {
  if (samples.empty()) throw ValidationError("no samples");
  if (std::isnan(p) || p <= 0.0 || p > 1.0) {
    throw ValidationError("p must lie in (0, 1]");
  }
  const std::size_t count = CeilCount(p, samples.size());
  std::vector<float> sorted(samples.begin(), samples.end());
  std::nth_element(sorted.begin(),
                   sorted.begin() + static_cast<std::ptrdiff_t>(count - 1),
                   sorted.end(), std::greater<>());
  return sorted[count - 1];
}

double calibrate_fixed_p(const ScoreSamples& samples, double p, double alpha) {
  RequireLabels(samples);
  std::vector<double> thresholds(samples.n_points());
  for (std::size_t i = 0; i < samples.n_points(); ++i) {
    thresholds[i] = point_threshold(samples.samples(i, samples.label(i)), p);
  }
  return conformal_quantile(thresholds, alpha);
}

double calibrate_fixed_tau(const ScoreSamples& samples, double tau,
                           double alpha) {
  RequireLabels(samples);
  std::vector<double> fractions(samples.n_points());
  for (std::size_t i = 0; i < samples.n_points(); ++i) {
    fractions[i] = PassFraction(samples, i, samples.label(i), tau);
  }
  return conformal_quantile(fractions, alpha);
}

CalibrationResult robustify(double p_alpha, double tau_alpha,
                            double p_alpha_down,
                            const SmoothingScheme& scheme,
                            const ThreatModel& ball) {
  check_compatible(scheme, ball);
  CalibrationResult r;
  r.scheme = scheme;
  r.ball = ball;
  r.p_alpha = p_alpha;
  r.tau_alpha = tau_alpha;
  r.p_alpha_down = std::max(p_alpha_down, 0.0);
  if (p_alpha_down < 0.0) {
    r.degenerate = true;
    r.cert_threshold = 0.0;
  } else {
    r.cert_threshold = cert_lower(p_alpha_down, scheme, ball).value();
  }
  return r;
}

CalibrationResult corrected_calibrate(const ScoreSamples& samples,
                                      const CalibrationConfig& config) {
  Calibrated calibrated = CalibrateUncertified(samples, config);
  CalibrationResult& r = calibrated.result;
  const CalibrationResult certified =
      robustify(r.p_alpha, r.tau_alpha, r.degenerate ? -1.0 : r.p_alpha_down,
                config.scheme, config.ball);
  r.cert_threshold = certified.cert_threshold;
  return r;
}

std::vector<PredictionSet> predict(const CalibrationResult& calibration,
                                   const ScoreSamples& test) {
  CheckTestShape(test, calibration.k);
  std::optional<ClopperPearsonTable> table;
  if (!calibration.exact) {
    if (test.exact_mode()) {
      throw ValidationError("exact-mode test scores need an exact calibration");
    }
    if (test.m_samples() != calibration.m) {
      throw ValidationError("sample-count mismatch between calibration and test");
    }
    table.emplace(test.m_samples(), calibration.per_test_eta());
  }
  std::vector<PredictionSet> sets(test.n_points());
  for (std::size_t i = 0; i < test.n_points(); ++i) {
    PredictionSet& set = sets[i];
    set.point = i;
    set.per_class_fraction.reserve(test.n_classes());
    set.per_class_bound.reserve(test.n_classes());
    for (std::size_t y = 0; y < test.n_classes(); ++y) {
      double fraction = 0.0;
      double bound = 0.0;
      if (table) {
        const std::size_t passing =
            count_passing(test, i, y, calibration.tau_alpha);
        fraction = static_cast<double>(passing) /
                   static_cast<double>(test.m_samples());
        bound = table->upper(passing);
      } else {
        fraction = PassFraction(test, i, y, calibration.tau_alpha);
        bound = fraction;
      }
      set.per_class_fraction.push_back(fraction);
      set.per_class_bound.push_back(bound);
      if (bound >= calibration.cert_threshold) {
        set.classes.push_back(static_cast<std::uint32_t>(y));
      }
    }
  }
  return sets;
}

std::vector<PredictionSet> predict_calibration_time(
    const ScoreSamples& calibration_samples, const CalibrationConfig& config,
    const ScoreSamples& test) {
  Calibrated calibrated = CalibrateUncertified(calibration_samples, config);
  CalibrationResult& r = calibrated.result;
  std::vector<double> certified(calibrated.lower_stats.size());
  for (std::size_t i = 0; i < certified.size(); ++i) {
    certified[i] =
        cert_lower(calibrated.lower_stats[i], config.scheme, config.ball)
            .value();
  }
  const double q = conformal_quantile(certified, calibrated.level);
  r.cert_threshold = std::max(q, 0.0);
  return predict(r, test);
}

std::vector<PredictionSet> predict_test_time(
    const CalibrationResult& calibration, const ScoreSamples& test) {
  std::vector<PredictionSet> sets = predict(calibration, test);
  const ThreatModel inverse = invert_ball(calibration.ball);
  for (PredictionSet& set : sets) {
    set.classes.clear();
    for (std::size_t y = 0; y < set.per_class_bound.size(); ++y) {
      const double lifted =
          cert_upper(set.per_class_bound[y], calibration.scheme, inverse)
              .value();
      if (calibration.degenerate || lifted >= calibration.p_alpha_down) {
        set.classes.push_back(static_cast<std::uint32_t>(y));
      }
    }
  }
  return sets;
}

double rscp_inflate(double mean, double sigma, double r) {
  if (std::isnan(mean) || mean < 0.0 || mean > 1.0) {
    throw ValidationError("RSCP needs scores in [0, 1]");
  }
  if (r == 0.0) return mean;
  return numeric::normal_cdf(numeric::normal_quantile(mean) + r / sigma);
}

RscpCalibration rscp_calibrate(const ScoreSamples& samples,
                               const RscpConfig& config) {
  CheckAlpha(config.alpha);
  if (!(config.sigma > 0.0)) throw ValidationError("sigma must be > 0");
  if (std::isnan(config.r) || config.r < 0.0) {
    throw ValidationError("radius must be >= 0");
  }
  if (config.hoeffding_correction &&
      (std::isnan(config.eta) || config.eta <= 0.0 ||
       config.eta >= config.alpha)) {
    throw ValidationError("eta must lie in (0, alpha) for the corrected RSCP");
  }
  RequireLabels(samples);
  for (float v : samples.values()) {
    if (v < 0.0f || v > 1.0f) {
      throw ValidationError("unbounded score input: RSCP needs scores in [0, 1]");
    }
  }
  RscpCalibration out;
  out.config = config;
  out.n = samples.n_points();
  out.k = samples.n_classes();
  out.m = samples.m_samples();
  if (config.hoeffding_correction) {
    out.margin = hoeffding_bound(
        out.m, config.eta / static_cast<double>(out.n + out.k));
  }
  std::vector<double> scores = smooth_calibration_scores(samples);
  for (double& s : scores) s = std::clamp(s - out.margin, 0.0, 1.0);
  const double level =
      config.hoeffding_correction ? config.alpha - config.eta : config.alpha;
  out.threshold = conformal_quantile(scores, level);
  return out;
}

std::vector<PredictionSet> rscp_predict(const RscpCalibration& calibration,
                                        const ScoreSamples& test) {
  CheckTestShape(test, calibration.k);
  for (float v : test.values()) {
    if (v < 0.0f || v > 1.0f) {
      throw ValidationError("unbounded score input: RSCP needs scores in [0, 1]");
    }
  }
  std::vector<PredictionSet> sets(test.n_points());
  for (std::size_t i = 0; i < test.n_points(); ++i) {
    PredictionSet& set = sets[i];
    set.point = i;
    for (std::size_t y = 0; y < test.n_classes(); ++y) {
      const double mean = mean_score(test, i, y);
      const double raised = std::clamp(mean + calibration.margin, 0.0, 1.0);
      const double inflated = rscp_inflate(raised, calibration.config.sigma,
                                           calibration.config.r);
      set.per_class_fraction.push_back(mean);
      set.per_class_bound.push_back(inflated);
      if (inflated >= calibration.threshold) {
        set.classes.push_back(static_cast<std::uint32_t>(y));
      }
    }
  }
  return sets;
}

}  // namespace bincp
