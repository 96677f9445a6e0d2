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

#include "bincp/intervals.h"

#include <cmath>
#include <limits>
#include <string>

#include "bincp/error.h"
#include "bincp/numeric.h"

namespace bincp {
namespace {

void CheckEta(double eta) {
  if (std::isnan(eta) || eta <= 0.0 || eta >= 1.0) {
    throw ValidationError("eta must lie in (0, 1)");
  }
}

void CheckCounts(std::uint64_t successes, std::uint64_t m) {
  if (m == 0) throw ValidationError("sample count m must be >= 1");
  if (successes > m) {
    throw ValidationError("successes " + std::to_string(successes) +
                          " exceed m = " + std::to_string(m));
  }
}

}  // namespace

double IntervalSpec::per_test_eta() const {
  return eta_total / static_cast<double>(n_cal + k_classes);
}

IntervalSpec make_interval_spec(double eta_total, std::size_t n_cal,
                                std::size_t k_classes) {
  CheckEta(eta_total);
  if (n_cal + k_classes == 0) {
    throw ValidationError("interval budget needs at least one test");
  }
  return IntervalSpec{eta_total, n_cal, k_classes};
}

double cp_lower(std::uint64_t successes, std::uint64_t m, double eta) {
  CheckCounts(successes, m);
  CheckEta(eta);
  if (successes == 0) return 0.0;
  return numeric::beta_quantile(eta, static_cast<double>(successes),
                                static_cast<double>(m - successes + 1));
}

double cp_upper(std::uint64_t successes, std::uint64_t m, double eta) {
  CheckCounts(successes, m);
  CheckEta(eta);
  if (successes == m) return 1.0;
  return numeric::beta_quantile(1.0 - eta, static_cast<double>(successes + 1),
                                static_cast<double>(m - successes));
}

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

ClopperPearsonTable::ClopperPearsonTable(std::uint64_t m, double eta)
    : m_(m), eta_(eta) {
  CheckCounts(0, m);
  CheckEta(eta);
  lower_.assign(m + 1, kUnset);
  upper_.assign(m + 1, kUnset);
}

double ClopperPearsonTable::lower(std::uint64_t successes) const {
  CheckCounts(successes, m_);
  double& slot = lower_[successes];
  if (std::isnan(slot)) slot = cp_lower(successes, m_, eta_);
  return slot;
}

double ClopperPearsonTable::upper(std::uint64_t successes) const {
  CheckCounts(successes, m_);
  double& slot = upper_[successes];
  if (std::isnan(slot)) slot = cp_upper(successes, m_, eta_);
  return slot;
}

double hoeffding_bound(std::uint64_t m, double eta) {
  if (m == 0) throw ValidationError("hoeffding bound needs m >= 1");
  if (std::isnan(eta) || eta <= 0.0 || eta > 1.0) {
    throw ValidationError("eta must lie in (0, 1]");
  }
  return std::sqrt(std::log(1.0 / eta) / (2.0 * static_cast<double>(m)));
}

double bernstein_bound(std::uint64_t m, double sample_variance, double eta) {
  if (m < 2) throw ValidationError("bernstein bound needs m >= 2");
  if (std::isnan(sample_variance) || sample_variance < 0.0) {
    throw ValidationError("sample variance must be >= 0");
  }
  if (std::isnan(eta) || eta <= 0.0 || eta > 2.0) {
    throw ValidationError("eta must lie in (0, 2]");
  }
  const double md = static_cast<double>(m);
  const double log_term = std::log(2.0 / eta);
  return std::sqrt(2.0 * sample_variance * log_term / md) +
         7.0 * log_term / (3.0 * (md - 1.0));
}

double normal_approx_margin(double p_hat, std::uint64_t m, double eta) {
  if (m == 0) throw ValidationError("normal approximation needs m >= 1");
  if (std::isnan(p_hat) || p_hat < 0.0 || p_hat > 1.0) {
    throw ValidationError("p_hat must lie in [0, 1]");
  }
  CheckEta(eta);
  const double z = numeric::normal_quantile(1.0 - eta);
  return z * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(m));
}

DominanceResult cp_vs_hoeffding(double a, double b, double tau,
                                const ClopperPearsonTable& table) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw ValidationError("invalid Beta parameters");
  }
  if (std::isnan(tau) || tau <= 0.0 || tau >= 1.0) {
    throw ValidationError("tau must lie in (0, 1)");
  }
  const std::uint64_t m = table.m();
  const double expected = 1.0 - numeric::regularized_beta(tau, a, b);
  const double margin = hoeffding_bound(m, table.eta());
  std::int64_t break_point = -1;
  for (std::uint64_t m_plus = 0; m_plus <= m; ++m_plus) {
    if (table.upper(m_plus) - expected <= margin) {
      break_point = static_cast<std::int64_t>(m_plus);
    }
  }
  const double probability =
      numeric::binomial_cdf(break_point, static_cast<std::int64_t>(m),
                            expected);
  return DominanceResult{expected, break_point, probability};
}

DominanceResult cp_vs_hoeffding(double a, double b, double tau,
                                std::uint64_t m, double eta) {
  return cp_vs_hoeffding(a, b, tau, ClopperPearsonTable(m, eta));
}

double cp_vs_hoeffding_probability(double a, double b, double tau,
                                   std::uint64_t m, double eta) {
  return cp_vs_hoeffding(a, b, tau, m, eta).probability;
}

}  // namespace bincp
