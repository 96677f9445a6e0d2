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

#ifndef BINCP_INTERVALS_H_
#define BINCP_INTERVALS_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bincp {

// Failure budget eta split evenly over n calibration bounds and k test-class
// bounds.
struct IntervalSpec {
  double eta_total;
  std::size_t n_cal;
  std::size_t k_classes;

  double per_test_eta() const;
};

// Validates eta_total in (0, 1) and n_cal + k_classes >= 1.
IntervalSpec make_interval_spec(double eta_total, std::size_t n_cal,
                                std::size_t k_classes);

// One-sided Clopper-Pearson bounds on a binomial proportion, each valid with
// probability at least 1 - eta.
double cp_lower(std::uint64_t successes, std::uint64_t m, double eta);
double cp_upper(std::uint64_t successes, std::uint64_t m, double eta);

// Precomputed cp_lower / cp_upper for every success count 0..m at one
// (m, eta). Calibration and prediction only ever query integer counts, so a
// table replaces thousands of Beta inversions per run.
// Bounds are computed on first use and cached; a table is not safe for
// concurrent use from several threads.
class ClopperPearsonTable {
 public:
  ClopperPearsonTable(std::uint64_t m, double eta);

  double lower(std::uint64_t successes) const;
  double upper(std::uint64_t successes) const;
  std::uint64_t m() const { return m_; }
  double eta() const { return eta_; }

 private:
  std::uint64_t m_;
  double eta_;
  mutable std::vector<double> lower_;
  mutable std::vector<double> upper_;
};

// sqrt(ln(1/eta) / (2m)).
double hoeffding_bound(std::uint64_t m, double eta);

// sqrt(2 var ln(2/eta) / m) + 7 ln(2/eta) / (3 (m - 1)); requires m >= 2.
double bernstein_bound(std::uint64_t m, double sample_variance, double eta);

// Margin of the normal-approximation upper bound,
// z_{1-eta} * sqrt(p_hat (1 - p_hat) / m).
double normal_approx_margin(double p_hat, std::uint64_t m, double eta);

struct DominanceResult {
  double expected;       // E[Y] = 1 - F_Beta(tau; a, b)
  std::int64_t break_point;  // largest m_+ where CP beats Hoeffding, -1 if none
  double probability;    // Pr[cp_upper - E[Y] <= hoeffding_bound]
};

// Probability, over m draws of X ~ Beta(a, b), that the Clopper-Pearson upper
// bound on Pr[X > tau] overshoots the true value by no more than the
// Hoeffding margin. The break point is found by a full linear scan over
// m_+ = 0..m; no monotonicity is assumed.
DominanceResult cp_vs_hoeffding(double a, double b, double tau,
                                std::uint64_t m, double eta);
// Same, reusing precomputed upper bounds for (table.m(), table.eta()).
DominanceResult cp_vs_hoeffding(double a, double b, double tau,
                                const ClopperPearsonTable& table);
double cp_vs_hoeffding_probability(double a, double b, double tau,
                                   std::uint64_t m, double eta);

}  // namespace bincp

#endif  // BINCP_INTERVALS_H_
