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

#ifndef BINCP_NUMERIC_H_
#define BINCP_NUMERIC_H_

#include <cstdint>

// Special functions shared by the interval and certificate code.
namespace bincp::numeric {

// Standard normal CDF and its upper tail, 1 - normal_cdf(x), computed
// without cancellation.
double normal_cdf(double x);
double normal_sf(double x);

// Inverse of normal_cdf. Returns -inf at 0 and +inf at 1.
double normal_quantile(double p);

// Regularized incomplete Beta function I_x(a, b) for a, b > 0.
double regularized_beta(double x, double a, double b);

// Smallest x in [0, 1] with I_x(a, b) >= q, located by bisection to an
// absolute error of kBetaQuantileTolerance.
double beta_quantile(double q, double a, double b);
inline constexpr double kBetaQuantileTolerance = 1e-12;

// Pr[X <= k] for X ~ Binomial(n, p). Negative k gives 0.
double binomial_cdf(std::int64_t k, std::int64_t n, double p);

}  // namespace bincp::numeric

#endif  // BINCP_NUMERIC_H_
