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

// Acceptance checks. Each criterion prints one line
//   AC-N PASS|FAIL <measurements> runtime=<s>/<limit>s
// and the binary exits non-zero when any requested criterion fails.
// Usage: acceptance_test [AC-N ...]   (no argument runs all of them)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bincp/certify.h"
#include "bincp/conformal.h"
#include "bincp/intervals.h"
#include "bincp/numeric.h"
#include "bincp/rng.h"
#include "bincp/simulate.h"
#include "oracles.h"

namespace bincp {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::function<Outcome()> run;
  double limit_seconds;
};

std::string Fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

// Seed fixed before any acceptance run was looked at.
constexpr std::uint64_t kSeed = 20261015;

GeneratorSpec Generator() {
  GeneratorSpec g;
  g.n_points = 100;
  g.n_test = 100;
  g.n_classes = 10;
  g.m_samples = 200;
  g.seed = kSeed;
  return g;
}

Outcome RoundTrip() {
  double worst = 0.0;
  std::size_t checked = 0;
  auto check = [&](const SmoothingScheme& scheme, const ThreatModel& ball,
                   double p) {
    const Probability up = cert_upper(p, scheme, invert_ball(ball));
    if (scheme.kind() == SmoothingScheme::Kind::kUniform &&
        up.value() >= 1.0) {
      return;  // clamp-saturated
    }
    worst = std::max(worst, std::abs(cert_lower(up, scheme, ball).value() - p));
    ++checked;
  };
  for (int i = 1; i <= 99; ++i) {
    const double p = i / 100.0;
    for (double sigma : {0.12, 0.25, 0.5}) {
      for (int j = 1; j <= 10; ++j) {
        check(SmoothingScheme::Gaussian(sigma), ThreatModel::L2(0.05 * j), p);
      }
    }
    for (double lambda : {0.25 / std::sqrt(3.0), 0.5 / std::sqrt(3.0)}) {
      for (int j = 1; j <= 10; ++j) {
        check(SmoothingScheme::Uniform(lambda), ThreatModel::L1(0.02 * j), p);
      }
    }
    const auto sparse = SmoothingScheme::SparseBernoulli(0.01, 0.6);
    for (std::uint32_t ra = 0; ra <= 3; ++ra) {
      for (std::uint32_t rd = 0; rd <= 3; ++rd) {
        check(sparse, ThreatModel::BinaryFlip(ra, rd), p);
      }
    }
  }
  return {worst <= 1e-9, "max_abs_error=" + Fmt("%.3g", worst) +
                             " cases=" + std::to_string(checked)};
}

Outcome SparseOracle() {
  const double grid[] = {0.01, 0.1, 0.3, 0.6, 0.9};
  double worst = 0.0;
  std::size_t checked = 0;
  for (double pp : grid) {
    for (double pm : grid) {
      const auto scheme = SmoothingScheme::SparseBernoulli(pp, pm);
      for (std::uint32_t ra = 0; ra <= 6; ++ra) {
        for (std::uint32_t rd = 0; ra + rd <= 6; ++rd) {
          const RegionTable table =
              build_region_table(scheme, ThreatModel::BinaryFlip(ra, rd));
          for (int i = 0; i <= 20; ++i) {
            const double p = i / 20.0;
            for (Direction d : {Direction::kMin, Direction::kMax}) {
              const double got = greedy_lp(table, p, d).value();
              const double want =
                  oracles::SparseBruteForce(pp, pm, ra, rd, p, d);
              worst = std::max(worst, std::abs(got - want));
              ++checked;
            }
          }
        }
      }
    }
  }
  return {worst <= 1e-10, "max_abs_error=" + Fmt("%.3g", worst) +
                              " cases=" + std::to_string(checked)};
}

Outcome CleanCoverage() {
  EvalConfig c;
  c.generator = Generator();
  c.pipeline = PipelineMode::kBinCp;
  c.calibration.alpha = 0.1;
  c.calibration.eta = 0.0;
  c.calibration.exact = true;
  c.trials = 1000;
  c.threads = 4;
  const Report r = evaluate(c);
  const double hi = 0.9 + 2.0 / 101.0 + 3 * r.coverage.se;
  const bool pass = r.coverage.mean >= 0.9 && r.coverage.mean <= hi;
  return {pass, "mean_coverage=" + Fmt("%.5f", r.coverage.mean) +
                    " se=" + Fmt("%.5f", r.coverage.se) +
                    " band=[0.90000, " + Fmt("%.5f", hi) + "]"};
}

Outcome RobustCoverage() {
  EvalConfig c;
  c.generator = Generator();
  c.pipeline = PipelineMode::kBinCpRobust;
  c.adversary = AdversaryMode::kWorstCase;
  c.calibration.alpha = 0.1;
  c.calibration.eta = 0.01;
  c.calibration.scheme = SmoothingScheme::Gaussian(0.5);
  c.calibration.ball = ThreatModel::L2(0.25);
  c.trials = 1000;
  c.threads = 4;
  const Report robust = evaluate(c);
  c.pipeline = PipelineMode::kVanilla;
  const Report vanilla = evaluate(c);
  const double floor = 0.9 - 3 * robust.coverage.se;
  const bool pass = robust.coverage.mean >= floor &&
                    vanilla.coverage.mean < robust.coverage.mean;
  return {pass, "robust=" + Fmt("%.5f", robust.coverage.mean) + " (>= " +
                    Fmt("%.5f", floor) + ") vanilla=" +
                    Fmt("%.5f", vanilla.coverage.mean) +
                    " robust_set_size=" + Fmt("%.3f", robust.set_size.mean)};
}

Outcome SingleCertificate() {
  const std::vector<std::pair<SmoothingScheme, ThreatModel>> cases = {
      {SmoothingScheme::Gaussian(0.25), ThreatModel::L2(0.12)},
      {SmoothingScheme::Gaussian(0.5), ThreatModel::L2(0.25)},
      {SmoothingScheme::Uniform(0.5), ThreatModel::L1(0.1)},
      {SmoothingScheme::SparseBernoulli(0.01, 0.6),
       ThreatModel::BinaryFlip(1, 2)},
  };
  GeneratorSpec g = Generator();
  g.m_samples = 100;
  std::size_t mismatched = 0;
  std::size_t labels = 0;
  for (std::uint64_t instance = 0; instance < 100; ++instance) {
    const SyntheticData data = generate(g, instance);
    const auto& [scheme, ball] = cases[instance % cases.size()];
    CalibrationConfig c;
    c.alpha = 0.1;
    c.eta = 0.01;
    c.mode = instance % 2 == 0 ? CalibrationMode::kFixedTau
                               : CalibrationMode::kFixedP;
    c.scheme = scheme;
    c.ball = ball;
    const CalibrationResult r = corrected_calibrate(data.calibration, c);
    const auto single = predict(r, data.test);
    const auto at_calibration =
        predict_calibration_time(data.calibration, c, data.test);
    const auto at_test = predict_test_time(r, data.test);
    for (std::size_t i = 0; i < single.size(); ++i) {
      labels += single[i].classes.size();
      mismatched += single[i].classes != at_calibration[i].classes;
      mismatched += single[i].classes != at_test[i].classes;
    }
  }
  return {mismatched == 0, "mismatched_sets=" + std::to_string(mismatched) +
                               " instances=100 labels=" +
                               std::to_string(labels)};
}

// Pr[Hoeffding beats Clopper-Pearson] by simulation: draw the pass count
// directly and compare the two upper-bound overshoots.
double SimulatedHoeffdingBetter(double tau, std::uint64_t m, double eta,
                                int reps) {
  const ClopperPearsonTable table(m, eta);
  const double expected = 1.0 - numeric::regularized_beta(tau, 2, 2);
  const double margin = hoeffding_bound(m, eta);
  CounterRng rng({.seed = kSeed, .trial = m,
                  .tag = static_cast<std::uint64_t>(std::llround(tau * 1e6))});
  std::binomial_distribution<std::uint64_t> draw(m, expected);
  int worse = 0;
  for (int r = 0; r < reps; ++r) {
    worse += table.upper(draw(rng)) - expected > margin;
  }
  return static_cast<double>(worse) / reps;
}

Outcome IntervalDominance() {
  constexpr double kEta = 0.01;
  std::vector<double> taus;
  for (int i = 0; i < 50; ++i) taus.push_back(0.01 + 0.98 * i / 49.0);
  double worst = 0.0;
  std::uint64_t worst_m = 0;
  double worst_tau = 0.0;
  std::size_t violations = 0;
  for (std::uint64_t m = 20; m <= 500; m += 20) {
    const ClopperPearsonTable table(m, kEta);
    for (double tau : taus) {
      const double h = 1.0 - cp_vs_hoeffding(2, 2, tau, table).probability;
      violations += h > 0.25;
      if (h > worst) {
        worst = h;
        worst_m = m;
        worst_tau = tau;
      }
    }
  }
  // Monte-Carlo spot checks, including the worst grid point.
  const std::vector<std::pair<std::uint64_t, double>> spots = {
      {worst_m, worst_tau}, {20, taus[0]},   {20, taus[49]}, {100, taus[10]},
      {100, taus[25]},      {200, taus[30]}, {300, taus[5]}, {400, taus[40]},
      {500, taus[20]},      {500, taus[35]}};
  double worst_gap = 0.0;
  for (const auto& [m, tau] : spots) {
    const double closed = 1.0 - cp_vs_hoeffding_probability(2, 2, tau, m, kEta);
    worst_gap = std::max(
        worst_gap, std::abs(SimulatedHoeffdingBetter(tau, m, kEta, 100000) -
                            closed));
  }
  const bool pass = worst <= 0.25 && worst_gap <= 0.02;
  return {pass, "max_hoeffding_better=" + Fmt("%.4f", worst) + " at m=" +
                    std::to_string(worst_m) + " tau=" + Fmt("%.4f", worst_tau) +
                    " grid_violations=" + std::to_string(violations) +
                    "/1250 mc_max_gap=" + Fmt("%.4f", worst_gap)};
}

Outcome SampleBudget() {
  auto size_at = [](PipelineMode mode, std::size_t m) {
    EvalConfig c;
    c.generator = Generator();
    c.generator.m_samples = m;
    c.pipeline = mode;
    c.calibration.alpha = 0.1;
    c.calibration.eta = 0.01;
    c.calibration.scheme = SmoothingScheme::Gaussian(0.25);
    c.calibration.ball = ThreatModel::L2(0.12);
    c.trials = 200;
    c.threads = 4;
    return evaluate(c).set_size.mean;
  };
  const double b150 = size_at(PipelineMode::kBinCpRobust, 150);
  const double b2000 = size_at(PipelineMode::kBinCpRobust, 2000);
  const double r150 = size_at(PipelineMode::kRscp, 150);
  const double r2000 = size_at(PipelineMode::kRscp, 2000);
  const double bincp_gap = b150 - b2000;
  const double rscp_gap = r150 - r2000;
  return {bincp_gap < rscp_gap,
          "bincp_gap=" + Fmt("%.4f", bincp_gap) + " (" + Fmt("%.3f", b150) +
              " -> " + Fmt("%.3f", b2000) + ") rscp_gap=" +
              Fmt("%.4f", rscp_gap) + " (" + Fmt("%.3f", r150) + " -> " +
              Fmt("%.3f", r2000) + ")"};
}

Outcome Duality() {
  GeneratorSpec g = Generator();
  g.continuous = true;
  const double step = 1.0 / static_cast<double>(g.n_points + 1);
  double worst = 0.0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const std::vector<PointLaw> laws =
        generate_laws(g, trial).calibration_true_laws();
    const std::span<const PointLaw> view(laws);
    for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double tau = calibrate_fixed_p_exact(view, p, 0.1);
      const double back = calibrate_fixed_tau_exact(view, tau, 0.1);
      worst = std::max(worst, std::abs(back - p));
    }
  }
  return {worst <= step, "max_abs_error=" + Fmt("%.3g", worst) +
                             " step=" + Fmt("%.5f", step)};
}

const std::map<std::string, Criterion>& Criteria() {
  static const auto* criteria = new std::map<std::string, Criterion>{
      {"AC-1", {RoundTrip, 5}},        {"AC-2", {SparseOracle, 30}},
      {"AC-3", {CleanCoverage, 60}},   {"AC-4", {RobustCoverage, 300}},
      {"AC-5", {SingleCertificate, 60}}, {"AC-6", {IntervalDominance, 120}},
      {"AC-7", {SampleBudget, 300}},   {"AC-8", {Duality, 10}},
  };
  return *criteria;
}

}  // namespace
}  // namespace bincp

int main(int argc, char** argv) {
  const auto& criteria = bincp::Criteria();
  std::vector<std::string> names;
  for (int i = 1; i < argc; ++i) names.emplace_back(argv[i]);
  if (names.empty()) {
    for (const auto& [name, c] : criteria) names.push_back(name);
  }
  int failures = 0;
  for (const std::string& name : names) {
    const auto it = criteria.find(name);
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << name << '\n';
      return 2;
    }
    const auto start = std::chrono::steady_clock::now();
    bincp::Outcome outcome;
    try {
      outcome = it->second.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    const bool in_time = seconds <= it->second.limit_seconds;
    const bool pass = outcome.pass && in_time;
    std::cout << name << (pass ? " PASS " : " FAIL ") << outcome.detail
              << " runtime=" << bincp::Fmt("%.2f", seconds) << "/"
              << bincp::Fmt("%.0f", it->second.limit_seconds) << "s"
              << (in_time ? "" : " (over time limit)") << std::endl;
    failures += pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
