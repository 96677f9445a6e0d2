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

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "bincp/error.h"
#include "bincp/numeric.h"
#include "bincp/rng.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace bincp {
namespace {

using ::testing::DoubleNear;
using ::testing::HasSubstr;
using ::testing::ThrowsMessage;

// Oracle values computed with mpmath (100-digit bisection on betainc).
constexpr double kBetaInv005_90_11 = 0.8362823767241852;
constexpr double kBetaInv099_51_50 = 0.6192825330930475;

TEST(CpLowerTest, NoSuccessesGivesZero) { EXPECT_EQ(cp_lower(0, 100, 0.05), 0.0); }

TEST(CpLowerTest, AllSuccessesHasClosedForm) {
  EXPECT_THAT(cp_lower(100, 100, 0.05),
              DoubleNear(std::pow(0.05, 1.0 / 100.0), 1e-10));
}

TEST(CpLowerTest, MatchesOracle) {
  EXPECT_THAT(cp_lower(90, 100, 0.05), DoubleNear(kBetaInv005_90_11, 1e-10));
  EXPECT_THAT(cp_lower(90, 100, 0.05),
              DoubleNear(boost::math::ibeta_inv(90.0, 11.0, 0.05), 1e-10));
}

TEST(CpUpperTest, AllSuccessesGivesOne) { EXPECT_EQ(cp_upper(100, 100, 0.05), 1.0); }

TEST(CpUpperTest, NoSuccessesHasClosedForm) {
  EXPECT_THAT(cp_upper(0, 100, 0.05),
              DoubleNear(1.0 - std::pow(0.05, 1.0 / 100.0), 1e-10));
}

TEST(CpUpperTest, MatchesOracle) {
  EXPECT_THAT(cp_upper(50, 100, 0.01), DoubleNear(kBetaInv099_51_50, 1e-10));
}

TEST(CpBoundsTest, MatchBoostOnGrid) {
  for (std::uint64_t m : {1, 2, 17, 200, 1000}) {
    for (std::uint64_t s = 0; s <= m; s += 1 + m / 13) {
      for (double eta : {1e-5, 0.01, 0.2}) {
        const double lo =
            s == 0 ? 0.0 : boost::math::ibeta_inv(double(s), double(m - s + 1), eta);
        const double hi =
            s == m ? 1.0
                   : boost::math::ibeta_inv(double(s + 1), double(m - s), 1 - eta);
        EXPECT_NEAR(cp_lower(s, m, eta), lo, 1e-10) << s << "/" << m;
        EXPECT_NEAR(cp_upper(s, m, eta), hi, 1e-10) << s << "/" << m;
      }
    }
  }
}

TEST(CpBoundsTest, RejectsInvalidInput) {
  EXPECT_THAT([] { cp_lower(5, 4, 0.05); },
              ThrowsMessage<ValidationError>(HasSubstr("exceed")));
  EXPECT_THROW(cp_upper(0, 0, 0.05), ValidationError);
  EXPECT_THROW(cp_lower(1, 4, 0.0), ValidationError);
  EXPECT_THROW(cp_upper(1, 4, 1.0), ValidationError);
}

TEST(CpBoundsTest, BracketTheEstimate) {
  for (std::uint64_t m : {1, 5, 60, 333}) {
    for (std::uint64_t s = 0; s <= m; ++s) {
      const double p_hat = double(s) / double(m);
      EXPECT_LE(cp_lower(s, m, 0.05), p_hat);
      EXPECT_GE(cp_upper(s, m, 0.05), p_hat);
    }
  }
}

TEST(CpBoundsTest, Monotonicity) {
  const std::uint64_t m = 80;
  for (std::uint64_t s = 1; s <= m; ++s) {
    EXPECT_GE(cp_lower(s, m, 0.05), cp_lower(s - 1, m, 0.05));
    EXPECT_GE(cp_upper(s, m, 0.05), cp_upper(s - 1, m, 0.05));
  }
  for (std::uint64_t s : {0, 7, 40, 80}) {
    double prev_lo = 0.0, prev_hi = 1.0;
    for (double eta : {0.001, 0.01, 0.05, 0.1, 0.3}) {
      EXPECT_GE(cp_lower(s, m, eta), prev_lo);
      EXPECT_LE(cp_upper(s, m, eta), prev_hi);
      prev_lo = cp_lower(s, m, eta);
      prev_hi = cp_upper(s, m, eta);
    }
  }
}

TEST(CpBoundsTest, Coverage) {
  constexpr int kDraws = 10000;
  constexpr std::uint64_t kM = 50;
  constexpr double kEta = 0.05;
  const ClopperPearsonTable table(kM, kEta);
  const double tolerance = kEta + 3.0 * std::sqrt(kEta / kDraws);
  for (double p : {0.02, 0.2, 0.5, 0.77, 0.95}) {
    CounterRng rng({.seed = 5, .tag = static_cast<std::uint64_t>(p * 1e6)});
    int lower_misses = 0, upper_misses = 0;
    for (int d = 0; d < kDraws; ++d) {
      std::uint64_t s = 0;
      for (std::uint64_t j = 0; j < kM; ++j) s += rng.uniform() < p;
      lower_misses += table.lower(s) > p;
      upper_misses += table.upper(s) < p;
    }
    EXPECT_LE(double(lower_misses) / kDraws, tolerance) << p;
    EXPECT_LE(double(upper_misses) / kDraws, tolerance) << p;
  }
}

TEST(ClopperPearsonTableTest, MatchesDirectCalls) {
  const ClopperPearsonTable table(37, 0.003);
  EXPECT_EQ(table.m(), 37u);
  for (std::uint64_t s = 0; s <= 37; ++s) {
    EXPECT_EQ(table.lower(s), cp_lower(s, 37, 0.003));
    EXPECT_EQ(table.upper(s), cp_upper(s, 37, 0.003));
  }
  EXPECT_THROW(table.upper(38), ValidationError);
}

TEST(IntervalSpecTest, SplitsBudgetEvenly) {
  const IntervalSpec spec = make_interval_spec(0.005, 100, 10);
  EXPECT_DOUBLE_EQ(spec.per_test_eta(), 0.005 / 110);
  EXPECT_NEAR(110 * spec.per_test_eta(), 0.005, 1e-12);
  EXPECT_THROW(make_interval_spec(1.5, 1, 1), ValidationError);
  EXPECT_THROW(make_interval_spec(0.1, 0, 0), ValidationError);
}

TEST(HoeffdingTest, Examples) {
  EXPECT_NEAR(hoeffding_bound(100, std::exp(-2.0)), 0.1, 1e-15);
  EXPECT_EQ(hoeffding_bound(100, 1.0), 0.0);
  EXPECT_NEAR(hoeffding_bound(400, 0.05), hoeffding_bound(100, 0.05) / 2, 1e-15);
}

TEST(BernsteinTest, Examples) {
  EXPECT_NEAR(bernstein_bound(101, 0.0, 2.0 / std::exp(3.0)), 0.07, 1e-15);
  EXPECT_EQ(bernstein_bound(50, 0.0, 2.0), 0.0);
  EXPECT_NEAR(bernstein_bound(100, 0.25, 0.05), 0.22275343837136011, 1e-14);
  EXPECT_THROW(bernstein_bound(1, 0.0, 0.1), ValidationError);
  EXPECT_THROW(bernstein_bound(10, -0.1, 0.1), ValidationError);
}

// The normal approximation is tighter than Hoeffding for every p_hat; this is
// a diagnostic inequality, not a coverage statement.
TEST(NormalApproximationTest, NeverWiderThanHoeffding) {
  for (std::uint64_t m : {10, 100, 2500}) {
    for (double p = 0.0; p <= 1.0; p += 0.01) {
      EXPECT_LE(normal_approx_margin(p, m, 0.05), hoeffding_bound(m, 0.05))
          << p;
    }
  }
}

TEST(CpVsHoeffdingTest, AlwaysTighterGivesOne) {
  // E[Y] close to 1: every CP upper bound lies within the Hoeffding margin.
  const DominanceResult r = cp_vs_hoeffding(2, 2, 0.01, 100, 0.01);
  EXPECT_EQ(r.break_point, 100);
  EXPECT_EQ(r.probability, 1.0);
}

TEST(CpVsHoeffdingTest, ExpectedValueIsBetaSurvival) {
  const DominanceResult r = cp_vs_hoeffding(2, 5, 0.3, 40, 0.01);
  EXPECT_NEAR(r.expected, 1.0 - boost::math::ibeta(2.0, 5.0, 0.3), 1e-14);
}

TEST(CpVsHoeffdingTest, BreakPointIsLastSatisfyingCount) {
  const std::uint64_t m = 60;
  const double eta = 0.01;
  const DominanceResult r = cp_vs_hoeffding(2, 2, 0.5, m, eta);
  std::int64_t want = -1;
  for (std::uint64_t s = 0; s <= m; ++s) {
    if (cp_upper(s, m, eta) - r.expected <= hoeffding_bound(m, eta)) want = s;
  }
  EXPECT_EQ(r.break_point, want);
  EXPECT_NEAR(r.probability, numeric::binomial_cdf(want, m, r.expected), 1e-15);
}

// Pr[cp_upper(m_+) - E[Y] <= hoeffding] estimated from simulated Beta(2, 2)
// draws (the median of three uniforms is Beta(2, 2)).
double SimulatedCpBetter(double tau, std::uint64_t m, double eta, int reps) {
  const ClopperPearsonTable table(m, eta);
  const double expected = 1.0 - numeric::regularized_beta(tau, 2, 2);
  const double margin = hoeffding_bound(m, eta);
  CounterRng rng({.seed = 17, .trial = m, .tag = static_cast<std::uint64_t>(tau * 1e6)});
  int better = 0;
  for (int r = 0; r < reps; ++r) {
    std::uint64_t m_plus = 0;
    for (std::uint64_t j = 0; j < m; ++j) {
      double u[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
      std::sort(u, u + 3);
      m_plus += u[1] > tau;
    }
    better += table.upper(m_plus) - expected <= margin;
  }
  return double(better) / reps;
}

TEST(CpVsHoeffdingTest, VanishingMeanGivesOne) {
  const double closed = cp_vs_hoeffding_probability(2, 2, 0.999, 100, 0.01);
  EXPECT_NEAR(closed, 1.0, 1e-9);
  EXPECT_NEAR(SimulatedCpBetter(0.999, 100, 0.01, 100000), closed, 0.02);
}

TEST(CpVsHoeffdingTest, AgreesWithSimulation) {
  for (double tau : {0.3, 0.65}) {
    const double closed = cp_vs_hoeffding_probability(2, 2, tau, 40, 0.01);
    EXPECT_NEAR(SimulatedCpBetter(tau, 40, 0.01, 20000), closed, 0.02) << tau;
  }
}

TEST(CpVsHoeffdingTest, RejectsInvalidParameters) {
  EXPECT_THAT([] { cp_vs_hoeffding_probability(0, 2, 0.5, 10, 0.01); },
              ThrowsMessage<ValidationError>(HasSubstr("invalid Beta")));
  EXPECT_THROW(cp_vs_hoeffding_probability(2, 2, 1.0, 10, 0.01),
               ValidationError);
}

}  // namespace
}  // namespace bincp
