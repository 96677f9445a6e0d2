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

#include "bincp/certify.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bincp/error.h"
#include "bincp/numeric.h"

namespace bincp {
namespace {

void CheckProbability(double p, const char* what) {
  if (std::isnan(p) || p < 0.0 || p > 1.0) {
    throw ValidationError(std::string(what) + " must lie in [0, 1]");
  }
}

double Clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double Binomial(std::uint32_t n, std::uint32_t k) {
  double c = 1.0;
  for (std::uint32_t i = 1; i <= k; ++i) {
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return c;
}

// Phi^{-1}(p) evaluated on whichever tail of p is represented accurately.
double NormalScore(const Probability& p) {
  if (p.value() <= 0.5) return numeric::normal_quantile(p.value());
  return -numeric::normal_quantile(p.complement());
}

Probability NormalProbability(double z) {
  return Probability::FromParts(numeric::normal_cdf(z), numeric::normal_sf(z));
}

struct FillResult {
  double taken;  // objective over the regions assigned to the budget
  double rest;   // objective over the remaining regions
};

// Greedily spends `budget` units of t-mass over regions in `order`.
FillResult Fill(const std::vector<std::size_t>& order, double budget,
                const RegionTable& table) {
  FillResult result{0.0, 0.0};
  for (std::size_t i : order) {
    const double t = table.t[i];
    const double tt = table.t_tilde[i];
    if (budget <= 0.0) {
      result.rest += tt;
    } else if (t <= budget) {
      result.taken += tt;
      budget -= t;
    } else {
      const double delta = budget / t;
      result.taken += delta * tt;
      result.rest += (1.0 - delta) * tt;
      budget = 0.0;
    }
  }
  return result;
}

}  // namespace

Probability::Probability(double value) : value_(value), complement_(0.0) {
  CheckProbability(value, "probability");
  complement_ = 1.0 - value;
}

Probability Probability::FromComplement(double complement) {
  CheckProbability(complement, "probability complement");
  return Probability(1.0 - complement, complement);
}

Probability Probability::FromParts(double value, double complement) {
  value = Clamp01(value);
  complement = Clamp01(complement);
  if (complement < value) return Probability(1.0 - complement, complement);
  return Probability(value, 1.0 - value);
}

ThreatModel ThreatModel::L2(double r) {
  if (std::isnan(r) || r < 0.0) throw ValidationError("radius must be >= 0");
  return ThreatModel(Norm{Kind::kL2, r});
}

ThreatModel ThreatModel::L1(double r) {
  if (std::isnan(r) || r < 0.0) throw ValidationError("radius must be >= 0");
  return ThreatModel(Norm{Kind::kL1, r});
}

ThreatModel ThreatModel::BinaryFlip(std::uint32_t r_add, std::uint32_t r_del) {
  return ThreatModel(Flip{r_add, r_del});
}

ThreatModel::Kind ThreatModel::kind() const {
  if (const auto* norm = std::get_if<Norm>(&ball_)) return norm->kind;
  return Kind::kBinaryFlip;
}

double ThreatModel::radius() const {
  if (const auto* norm = std::get_if<Norm>(&ball_)) return norm->r;
  throw ValidationError("binary-flip ball has no scalar radius");
}

std::uint32_t ThreatModel::r_add() const {
  if (const auto* flip = std::get_if<Flip>(&ball_)) return flip->r_add;
  throw ValidationError("norm ball has no add budget");
}

std::uint32_t ThreatModel::r_del() const {
  if (const auto* flip = std::get_if<Flip>(&ball_)) return flip->r_del;
  throw ValidationError("norm ball has no delete budget");
}

bool ThreatModel::is_zero() const {
  if (const auto* norm = std::get_if<Norm>(&ball_)) return norm->r == 0.0;
  const auto& flip = std::get<Flip>(ball_);
  return flip.r_add == 0 && flip.r_del == 0;
}

std::string ThreatModel::describe() const {
  std::ostringstream out;
  switch (kind()) {
    case Kind::kL2:
      out << "l2(r=" << radius() << ")";
      break;
    case Kind::kL1:
      out << "l1(r=" << radius() << ")";
      break;
    case Kind::kBinaryFlip:
      out << "flip(ra=" << r_add() << ",rd=" << r_del() << ")";
      break;
  }
  return out.str();
}

SmoothingScheme SmoothingScheme::Gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("sigma must be > 0");
  }
  return SmoothingScheme(Kind::kGaussian, sigma, 0.0, false);
}

SmoothingScheme SmoothingScheme::Uniform(double lambda, bool exact) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("lambda must be > 0");
  }
  return SmoothingScheme(Kind::kUniform, lambda, 0.0, exact);
}

SmoothingScheme SmoothingScheme::SparseBernoulli(double p_plus,
                                                 double p_minus) {
  if (!(p_plus > 0.0 && p_plus < 1.0) || !(p_minus > 0.0 && p_minus < 1.0)) {
    throw ValidationError("degenerate flip probabilities");
  }
  return SmoothingScheme(Kind::kSparse, p_plus, p_minus, false);
}

double SmoothingScheme::sigma() const {
  if (kind_ != Kind::kGaussian) throw ValidationError("scheme is not Gaussian");
  return a_;
}

double SmoothingScheme::lambda() const {
  if (kind_ != Kind::kUniform) throw ValidationError("scheme is not uniform");
  return a_;
}

double SmoothingScheme::p_plus() const {
  if (kind_ != Kind::kSparse) throw ValidationError("scheme is not sparse");
  return a_;
}

double SmoothingScheme::p_minus() const {
  if (kind_ != Kind::kSparse) throw ValidationError("scheme is not sparse");
  return b_;
}

std::string SmoothingScheme::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::kGaussian:
      out << "gaussian(sigma=" << a_ << ")";
      break;
    case Kind::kUniform:
      out << "uniform(lambda=" << a_ << (exact_ ? ",exact" : "") << ")";
      break;
    case Kind::kSparse:
      out << "sparse(p_plus=" << a_ << ",p_minus=" << b_ << ")";
      break;
  }
  return out.str();
}

ThreatModel invert_ball(const ThreatModel& ball) {
  if (ball.kind() == ThreatModel::Kind::kBinaryFlip) {
    return ThreatModel::BinaryFlip(ball.r_del(), ball.r_add());
  }
  return ball;
}

void check_compatible(const SmoothingScheme& scheme, const ThreatModel& ball) {
  using SK = SmoothingScheme::Kind;
  using BK = ThreatModel::Kind;
  const bool ok =
      (scheme.kind() == SK::kGaussian &&
       (ball.kind() == BK::kL2 || ball.kind() == BK::kL1)) ||
      (scheme.kind() == SK::kUniform && ball.kind() == BK::kL1) ||
      (scheme.kind() == SK::kSparse && ball.kind() == BK::kBinaryFlip);
  if (!ok) {
    throw ValidationError("incompatible scheme/ball: " + scheme.describe() +
                          " with " + ball.describe());
  }
}

RegionTable build_region_table(const SmoothingScheme& scheme,
                               const ThreatModel& ball) {
  check_compatible(scheme, ball);
  const double pp = scheme.p_plus();
  const double pm = scheme.p_minus();
  const std::uint32_t ra = ball.r_add();
  const std::uint32_t rd = ball.r_del();
  const std::size_t regions = static_cast<std::size_t>(ra) + rd + 1;

  RegionTable table;
  table.t.assign(regions, 0.0);
  table.t_tilde.assign(regions, 0.0);
  table.ratios.resize(regions);
  // Clean point is 0 on the r_add coordinates and 1 on the r_del ones; the
  // perturbed point is its complement there.
  for (std::uint32_t qa = 0; qa <= ra; ++qa) {
    for (std::uint32_t qd = 0; qd <= rd; ++qd) {
      const double ways = Binomial(ra, qa) * Binomial(rd, qd);
      table.t[qa + qd] += ways * std::pow(pp, qa) * std::pow(1.0 - pp, ra - qa) *
                          std::pow(pm, qd) * std::pow(1.0 - pm, rd - qd);
      table.t_tilde[qa + qd] +=
          ways * std::pow(1.0 - pm, qa) * std::pow(pm, ra - qa) *
          std::pow(1.0 - pp, qd) * std::pow(pp, rd - qd);
    }
  }
  const double log_add = std::log(pp / (1.0 - pm));
  const double log_del = std::log(pm / (1.0 - pp));
  for (std::size_t q = 0; q < regions; ++q) {
    const double qd = static_cast<double>(q);
    table.ratios[q] = std::exp((qd - rd) * log_add + (qd - ra) * log_del);
  }
  return table;
}

Probability greedy_lp(const RegionTable& table, Probability p,
                      Direction direction) {
  const std::size_t regions = table.t.size();
  if (regions == 0 || table.t_tilde.size() != regions ||
      table.ratios.size() != regions) {
    throw ValidationError("malformed region table");
  }
  std::vector<std::size_t> order(regions);
  std::iota(order.begin(), order.end(), 0);
  // Minimisation spends the budget where the clean point has the most mass
  // per unit of perturbed mass; maximisation does the opposite.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return direction == Direction::kMin
                                ? table.ratios[a] > table.ratios[b]
                                : table.ratios[a] < table.ratios[b];
                   });
  if (p.value() <= 0.5) {
    const FillResult fill = Fill(order, p.value(), table);
    return Probability::FromParts(fill.taken, fill.rest);
  }
  // Spend the complement on h = 0 from the far end of the order instead.
  std::reverse(order.begin(), order.end());
  const FillResult fill = Fill(order, p.complement(), table);
  return Probability::FromParts(fill.rest, fill.taken);
}

Probability cert_lower(Probability p, const SmoothingScheme& scheme,
                       const ThreatModel& ball) {
  check_compatible(scheme, ball);
  switch (scheme.kind()) {
    case SmoothingScheme::Kind::kGaussian:
      if (ball.radius() == 0.0) return p;
      return NormalProbability(NormalScore(p) - ball.radius() / scheme.sigma());
    case SmoothingScheme::Kind::kUniform: {
      const double shift = ball.radius() / (2.0 * scheme.lambda());
      return Probability::FromParts(p.value() - shift, p.complement() + shift);
    }
    case SmoothingScheme::Kind::kSparse:
      return greedy_lp(build_region_table(scheme, ball), p, Direction::kMin);
  }
  return p;
}

Probability cert_upper(Probability p, const SmoothingScheme& scheme,
                       const ThreatModel& ball) {
  check_compatible(scheme, ball);
  switch (scheme.kind()) {
    case SmoothingScheme::Kind::kGaussian:
      if (ball.radius() == 0.0) return p;
      return NormalProbability(NormalScore(p) + ball.radius() / scheme.sigma());
    case SmoothingScheme::Kind::kUniform: {
      const double shift = ball.radius() / (2.0 * scheme.lambda());
      return Probability::FromParts(p.value() + shift, p.complement() - shift);
    }
    case SmoothingScheme::Kind::kSparse:
      return greedy_lp(build_region_table(scheme, ball), p, Direction::kMax);
  }
  return p;
}

}  // namespace bincp
