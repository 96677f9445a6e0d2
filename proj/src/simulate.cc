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

#include "bincp/simulate.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "bincp/error.h"
#include "bincp/numeric.h"

namespace bincp {
namespace {

constexpr std::uint64_t kLawTag = 0x4c415753;     // "LAWS"
constexpr std::uint64_t kSampleTag = 0x534d504c;  // "SMPL"
constexpr std::uint64_t kAttackTag = 0x41544b53;  // "ATKS"

// Keeps continuous laws away from the degenerate Beta(0, c) endpoints.
constexpr double kMeanFloor = 1e-6;

double DrawGamma(CounterRng& rng, double shape) {
  std::gamma_distribution<double> gamma(shape, 1.0);
  return gamma(rng);
}

double DrawBeta(CounterRng& rng, double a, double b) {
  const double x = DrawGamma(rng, a);
  const double y = DrawGamma(rng, b);
  return x / (x + y);
}

ThreatModel ZeroLike(const ThreatModel& ball) {
  switch (ball.kind()) {
    case ThreatModel::Kind::kL2:
      return ThreatModel::L2(0.0);
    case ThreatModel::Kind::kL1:
      return ThreatModel::L1(0.0);
    case ThreatModel::Kind::kBinaryFlip:
      break;
  }
  return ThreatModel::BinaryFlip(0, 0);
}

bool IsBinCp(PipelineMode mode) {
  return mode == PipelineMode::kBinCp || mode == PipelineMode::kBinCpRobust;
}

// Smallest float >= tau, and the float just below it.
std::pair<float, float> PassFailValues(double tau) {
  if (!std::isfinite(tau)) return {0.0f, -1.0f};
  const double limit = std::numeric_limits<float>::max() / 2;
  tau = std::clamp(tau, -limit, limit);
  float pass = static_cast<float>(tau);
  if (pass < tau) pass = std::nextafter(pass, std::numeric_limits<float>::max());
  return {pass, std::nextafter(pass, std::numeric_limits<float>::lowest())};
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       since)
      .count();
}

}  // namespace

PointLaw PointLaw::Bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("Bernoulli probability outside [0, 1]");
  }
  return PointLaw(false, p, 0.0);
}

PointLaw PointLaw::Beta(double mean, double concentration) {
  if (!(mean > 0.0 && mean < 1.0) || !(concentration > 0.0)) {
    throw ValidationError("invalid Beta parameters");
  }
  return PointLaw(true, mean, concentration);
}

double PointLaw::survival(double tau) const {
  if (tau <= 0.0) return 1.0;
  if (tau > 1.0) return 0.0;
  if (!continuous_) return mean_;
  if (tau == 1.0) return 0.0;
  // 1 - I_tau(a, b) = I_{1 - tau}(b, a).
  return numeric::regularized_beta(1.0 - tau, concentration_ * (1.0 - mean_),
                                   concentration_ * mean_);
}

double PointLaw::upper_quantile(double p) const {
  if (!(p > 0.0 && p <= 1.0)) throw ValidationError("p must lie in (0, 1]");
  if (!continuous_) return p <= mean_ ? 1.0 : 0.0;
  if (p == 1.0) return 0.0;
  return numeric::beta_quantile(1.0 - p, concentration_ * mean_,
                                concentration_ * (1.0 - mean_));
}

float PointLaw::sample(CounterRng& rng) const {
  if (!continuous_) return rng.uniform() < mean_ ? 1.0f : 0.0f;
  return static_cast<float>(DrawBeta(rng, concentration_ * mean_,
                                     concentration_ * (1.0 - mean_)));
}

void GeneratorSpec::validate() const {
  if (n_points == 0 || n_test == 0) throw ValidationError("empty point set");
  if (n_classes == 0) throw ValidationError("need at least one class");
  if (m_samples == 0) throw ValidationError("m_samples must be >= 1");
  if (!(beta_a > 0.0) || !(beta_b > 0.0)) {
    throw ValidationError("invalid Beta parameters");
  }
  if (!(off_class_scale > 0.0 && off_class_scale <= 1.0)) {
    throw ValidationError("off_class_scale must lie in (0, 1]");
  }
  if (!(concentration > 0.0)) throw ValidationError("concentration must be > 0");
  if (fixed_true_probability &&
      !(*fixed_true_probability >= 0.0 && *fixed_true_probability <= 1.0)) {
    throw ValidationError("fixed true probability outside [0, 1]");
  }
}

std::vector<PointLaw> SyntheticLaws::calibration_true_laws() const {
  std::vector<PointLaw> out;
  out.reserve(n_cal);
  for (std::size_t i = 0; i < n_cal; ++i) out.push_back(law(i, labels[i]));
  return out;
}

ExactProbabilities SyntheticLaws::pass_probabilities(double tau,
                                                     std::size_t begin,
                                                     std::size_t end) const {
  ExactProbabilities out;
  out.n_points = end - begin;
  out.n_classes = n_classes;
  out.values.reserve(out.n_points * n_classes);
  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t c = 0; c < n_classes; ++c) {
      out.values.push_back(law(i, c).survival(tau));
    }
  }
  out.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(begin),
                    labels.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

ExactProbabilities SyntheticLaws::means(std::size_t begin,
                                        std::size_t end) const {
  ExactProbabilities out;
  out.n_points = end - begin;
  out.n_classes = n_classes;
  out.values.reserve(out.n_points * n_classes);
  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t c = 0; c < n_classes; ++c) {
      out.values.push_back(law(i, c).mean());
    }
  }
  out.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(begin),
                    labels.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

SyntheticLaws generate_laws(const GeneratorSpec& spec, std::uint64_t trial) {
  spec.validate();
  SyntheticLaws out;
  out.n_cal = spec.n_points;
  out.n_test = spec.n_test;
  out.n_classes = spec.n_classes;
  const std::size_t total = spec.n_points + spec.n_test;
  const std::size_t k = spec.n_classes;
  out.laws.reserve(total * k);
  out.labels.reserve(total);
  auto make = [&](double mean) {
    if (!spec.continuous) return PointLaw::Bernoulli(mean);
    return PointLaw::Beta(std::clamp(mean, kMeanFloor, 1.0 - kMeanFloor),
                          spec.concentration);
  };
  for (std::size_t i = 0; i < total; ++i) {
    CounterRng rng({.seed = spec.seed, .trial = trial, .point = i,
                    .tag = kLawTag});
    const double p = spec.fixed_true_probability
                         ? *spec.fixed_true_probability
                         : DrawBeta(rng, spec.beta_a, spec.beta_b);
    const auto label = std::min<std::size_t>(
        static_cast<std::size_t>(rng.uniform() * static_cast<double>(k)),
        k - 1);
    out.labels.push_back(static_cast<std::uint32_t>(label));
    for (std::size_t c = 0; c < k; ++c) {
      const double mean =
          c == label ? p : rng.uniform() * p * spec.off_class_scale;
      out.laws.push_back(make(mean));
    }
  }
  return out;
}

ScoreSamples sample_scores(const SyntheticLaws& laws, std::size_t begin,
                           std::size_t end, std::size_t m,
                           const StreamKey& key) {
  const std::size_t k = laws.n_classes;
  std::vector<float> values;
  values.reserve((end - begin) * k * m);
  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      StreamKey stream = key;
      stream.point = i;
      stream.cls = c;
      CounterRng rng(stream);
      const PointLaw& law = laws.law(i, c);
      for (std::size_t j = 0; j < m; ++j) values.push_back(law.sample(rng));
    }
  }
  std::vector<std::uint32_t> labels(
      laws.labels.begin() + static_cast<std::ptrdiff_t>(begin),
      laws.labels.begin() + static_cast<std::ptrdiff_t>(end));
  return ScoreSamples(end - begin, k, m, std::move(values), std::move(labels));
}

SyntheticData generate(const GeneratorSpec& spec, std::uint64_t trial) {
  SyntheticLaws laws = generate_laws(spec, trial);
  const StreamKey key{.seed = spec.seed, .trial = trial, .tag = kSampleTag};
  const std::size_t total = laws.n_cal + laws.n_test;
  ScoreSamples calibration =
      sample_scores(laws, 0, laws.n_cal, spec.m_samples, key);
  ScoreSamples test =
      sample_scores(laws, laws.n_cal, total, spec.m_samples, key);
  return {std::move(laws), std::move(calibration), std::move(test)};
}

std::string to_string(AdversaryMode mode) {
  return mode == AdversaryMode::kNone ? "none" : "worst";
}

AdversaryMode adversary_mode_from_string(const std::string& text) {
  if (text == "none") return AdversaryMode::kNone;
  if (text == "worst") return AdversaryMode::kWorstCase;
  throw ValidationError("unknown adversary '" + text + "'");
}

ExactProbabilities attack(const ExactProbabilities& clean,
                          const AdversaryOracle& oracle) {
  if (oracle.mode == AdversaryMode::kNone) return clean;
  check_compatible(oracle.scheme, oracle.ball);
  const ThreatModel inverse = invert_ball(oracle.ball);
  ExactProbabilities out = clean;
  for (std::size_t i = 0; i < clean.n_points; ++i) {
    for (std::size_t c = 0; c < clean.n_classes; ++c) {
      const double p = std::clamp(clean.at(i, c), 0.0, 1.0);
      out.at(i, c) =
          c == clean.labels[i]
              ? cert_lower(p, oracle.scheme, oracle.ball).value()
              : cert_upper(p, oracle.scheme, inverse).value();
    }
  }
  return out;
}

ScoreSamples exact_scores(const ExactProbabilities& probs) {
  std::vector<float> values(probs.values.begin(), probs.values.end());
  return ScoreSamples(probs.n_points, probs.n_classes, 1, std::move(values),
                      probs.labels, /*exact_mode=*/true);
}

ScoreSamples bernoulli_scores(const ExactProbabilities& probs, std::size_t m,
                              float pass_value, float fail_value,
                              const StreamKey& key) {
  std::vector<float> values;
  values.reserve(probs.values.size() * m);
  for (std::size_t i = 0; i < probs.n_points; ++i) {
    for (std::size_t c = 0; c < probs.n_classes; ++c) {
      StreamKey stream = key;
      stream.point = i;
      stream.cls = c;
      CounterRng rng(stream);
      const double p = probs.at(i, c);
      for (std::size_t j = 0; j < m; ++j) {
        values.push_back(rng.uniform() < p ? pass_value : fail_value);
      }
    }
  }
  return ScoreSamples(probs.n_points, probs.n_classes, m, std::move(values),
                      probs.labels);
}

std::string to_string(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::kVanilla:
      return "vanilla";
    case PipelineMode::kBinCp:
      return "bincp";
    case PipelineMode::kBinCpRobust:
      return "bincp-robust";
    case PipelineMode::kRscp:
      break;
  }
  return "rscp";
}

PipelineMode pipeline_mode_from_string(const std::string& text) {
  if (text == "vanilla") return PipelineMode::kVanilla;
  if (text == "bincp") return PipelineMode::kBinCp;
  if (text == "bincp-robust") return PipelineMode::kBinCpRobust;
  if (text == "rscp") return PipelineMode::kRscp;
  throw ValidationError("unknown pipeline mode '" + text + "'");
}

void EvalConfig::validate() const {
  generator.validate();
  if (trials == 0) throw ValidationError("trials must be >= 1");
  if (threads == 0) throw ValidationError("threads must be >= 1");
  check_compatible(calibration.scheme, calibration.ball);
  switch (pipeline) {
    case PipelineMode::kVanilla:
      conformal_rank(1, calibration.alpha);  // checks alpha
      break;
    case PipelineMode::kRscp:
      if (calibration.scheme.kind() != SmoothingScheme::Kind::kGaussian ||
          calibration.ball.kind() != ThreatModel::Kind::kL2) {
        throw ValidationError("rscp needs Gaussian smoothing and an l2 ball");
      }
      [[fallthrough]];
    default:
      calibration.validate();
  }
}

TrialResult run_trial(const EvalConfig& config, std::uint64_t trial) {
  const GeneratorSpec& gen = config.generator;
  const CalibrationConfig& cc = config.calibration;
  const SyntheticLaws laws = generate_laws(gen, trial);
  const std::size_t n_cal = laws.n_cal;
  const std::size_t total = laws.n_cal + laws.n_test;
  const std::size_t m = gen.m_samples;
  const StreamKey sample_key{.seed = gen.seed, .trial = trial,
                             .tag = kSampleTag};
  const StreamKey attack_key{.seed = gen.seed, .trial = trial,
                             .tag = kAttackTag};
  const bool bincp = IsBinCp(config.pipeline);

  TrialResult result;
  result.trial = trial;

  auto start = std::chrono::steady_clock::now();
  CalibrationResult calibration;
  RscpCalibration rscp;
  double vanilla_q = 0.0;
  if (bincp) {
    CalibrationConfig effective = cc;
    if (config.pipeline == PipelineMode::kBinCp) {
      effective.ball = ZeroLike(cc.ball);
    }
    if (cc.exact && cc.mode == CalibrationMode::kFixedP) {
      effective.validate();
      const std::vector<PointLaw> true_laws = laws.calibration_true_laws();
      const double tau_alpha = calibrate_fixed_p_exact<PointLaw>(
          true_laws, effective.p, effective.alpha);
      const bool degenerate = conformal_rank(n_cal, effective.alpha) == 0;
      calibration = robustify(effective.p, tau_alpha,
                              degenerate ? -1.0 : effective.p,
                              effective.scheme, effective.ball);
      calibration.alpha = effective.alpha;
      calibration.mode = effective.mode;
      calibration.exact = true;
      calibration.n = n_cal;
      calibration.k = laws.n_classes;
      calibration.m = 1;
    } else {
      const ScoreSamples cal =
          cc.exact ? exact_scores(laws.pass_probabilities(cc.tau, 0, n_cal))
                   : sample_scores(laws, 0, n_cal, m, sample_key);
      calibration = corrected_calibrate(cal, effective);
    }
    result.threshold = calibration.cert_threshold;
  } else {
    const ScoreSamples cal = cc.exact
                                 ? exact_scores(laws.means(0, n_cal))
                                 : sample_scores(laws, 0, n_cal, m, sample_key);
    if (config.pipeline == PipelineMode::kVanilla) {
      vanilla_q = vanilla_threshold(smooth_calibration_scores(cal), cc.alpha);
      result.threshold = vanilla_q;
    } else {
      rscp = rscp_calibrate(cal, {.alpha = cc.alpha,
                                  .eta = cc.eta,
                                  .sigma = cc.scheme.sigma(),
                                  .r = cc.ball.radius(),
                                  .hoeffding_correction = !cc.exact});
      result.threshold = rscp.threshold;
    }
  }
  result.calibration_seconds = Seconds(start);

  const ExactProbabilities clean =
      bincp ? laws.pass_probabilities(calibration.tau_alpha, n_cal, total)
            : laws.means(n_cal, total);
  const ExactProbabilities attacked =
      attack(clean, {.scheme = cc.scheme, .ball = cc.ball,
                     .mode = config.adversary});
  std::optional<ScoreSamples> test;
  if (cc.exact) {
    test.emplace(exact_scores(attacked));
  } else if (config.adversary == AdversaryMode::kNone) {
    test.emplace(sample_scores(laws, n_cal, total, m, sample_key));
  } else {
    const auto [pass, fail] =
        bincp ? PassFailValues(calibration.tau_alpha)
              : std::pair<float, float>{1.0f, 0.0f};
    test.emplace(bernoulli_scores(attacked, m, pass, fail, attack_key));
  }

  start = std::chrono::steady_clock::now();
  std::vector<PredictionSet> sets;
  switch (config.pipeline) {
    case PipelineMode::kVanilla:
      sets = vanilla_predict(vanilla_q, *test);
      break;
    case PipelineMode::kRscp:
      sets = rscp_predict(rscp, *test);
      break;
    default:
      sets = predict(calibration, *test);
  }
  result.prediction_seconds = Seconds(start);

  std::size_t covered = 0;
  std::size_t size = 0;
  for (const PredictionSet& set : sets) {
    covered += set.contains(test->label(set.point)) ? 1 : 0;
    size += set.classes.size();
  }
  const double n_test = static_cast<double>(sets.size());
  result.coverage = static_cast<double>(covered) / n_test;
  result.set_size = static_cast<double>(size) / n_test;
  return result;
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.se = s.std / std::sqrt(n);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

Report evaluate(const EvalConfig& config) {
  config.validate();
  std::vector<TrialResult> results(config.trials);
  std::vector<std::exception_ptr> errors(config.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < config.trials; t = next++) {
      try {
        results[t] = run_trial(config, t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(config.threads, config.trials);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (std::size_t t = 0; t < config.trials; ++t) {
    if (!errors[t]) continue;
    try {
      std::rethrow_exception(errors[t]);
    } catch (const ValidationError& e) {
      throw ValidationError("trial " + std::to_string(t) + ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error("trial " + std::to_string(t) + ": " + e.what());
    }
  }

  Report report;
  report.trials = std::move(results);
  std::vector<double> coverage, set_size, cal_s, pred_s;
  for (const TrialResult& r : report.trials) {
    coverage.push_back(r.coverage);
    set_size.push_back(r.set_size);
    cal_s.push_back(r.calibration_seconds);
    pred_s.push_back(r.prediction_seconds);
  }
  report.coverage = summarize(coverage);
  report.set_size = summarize(set_size);
  report.calibration_seconds = summarize(cal_s);
  report.prediction_seconds = summarize(pred_s);
  return report;
}

}  // namespace bincp
