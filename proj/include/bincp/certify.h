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

#ifndef BINCP_CERTIFY_H_
#define BINCP_CERTIFY_H_

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace bincp {

// A probability carried together with its complement. Certificates near 1
// (e.g. Phi(10) for a large radius) are not representable as a double value
// alone; keeping 1 - p lets the round trip lower(upper(p)) stay exact.
class Probability {
 public:
  // Implicit on purpose: plain doubles are accepted wherever a Probability is.
  Probability(double value);  // NOLINT(google-explicit-constructor)

  static Probability FromComplement(double complement);
  // Both parts must be in [0, 1]; the more accurate of the two (the one
  // <= 0.5) determines the other.
  static Probability FromParts(double value, double complement);

  double value() const { return value_; }
  double complement() const { return complement_; }
  operator double() const { return value_; }  // NOLINT

 private:
  Probability(double value, double complement)
      : value_(value), complement_(complement) {}

  double value_;
  double complement_;
};

// Perturbation ball B(x).
class ThreatModel {
 public:
  enum class Kind { kL2, kL1, kBinaryFlip };

  static ThreatModel L2(double r);
  static ThreatModel L1(double r);
  // At most r_add 0->1 toggles and r_del 1->0 toggles.
  static ThreatModel BinaryFlip(std::uint32_t r_add, std::uint32_t r_del);

  Kind kind() const;
  // Radius of an L1 / L2 ball; throws for BinaryFlip.
  double radius() const;
  std::uint32_t r_add() const;
  std::uint32_t r_del() const;
  bool is_zero() const;

  std::string describe() const;

  friend bool operator==(const ThreatModel&, const ThreatModel&) = default;

 private:
  struct Norm {
    Kind kind;
    double r;
    friend bool operator==(const Norm&, const Norm&) = default;
  };
  struct Flip {
    std::uint32_t r_add;
    std::uint32_t r_del;
    friend bool operator==(const Flip&, const Flip&) = default;
  };
  explicit ThreatModel(std::variant<Norm, Flip> ball) : ball_(ball) {}

  std::variant<Norm, Flip> ball_;
};

// Smoothing distribution xi(x).
class SmoothingScheme {
 public:
  enum class Kind { kGaussian, kUniform, kSparse };

  static SmoothingScheme Gaussian(double sigma);
  // eps ~ U[0, 2 lambda]^d; `exact` marks de-randomized evaluation.
  static SmoothingScheme Uniform(double lambda, bool exact = false);
  // Bits flip 0->1 with probability p_plus and 1->0 with p_minus.
  static SmoothingScheme SparseBernoulli(double p_plus, double p_minus);

  Kind kind() const { return kind_; }
  double sigma() const;
  double lambda() const;
  bool exact() const { return exact_; }
  double p_plus() const;
  double p_minus() const;

  std::string describe() const;

  friend bool operator==(const SmoothingScheme&,
                         const SmoothingScheme&) = default;

 private:
  SmoothingScheme(Kind kind, double a, double b, bool exact)
      : kind_(kind), a_(a), b_(b), exact_(exact) {}

  Kind kind_;
  double a_;
  double b_;
  bool exact_;
};

// Regions of constant likelihood ratio between the canonical clean point and
// its perturbation under sparse smoothing. Region q holds the patterns with q
// of the r_add + r_del differing coordinates flipped away from the clean
// point.
struct RegionTable {
  std::vector<double> ratios;   // t[q] / t_tilde[q]
  std::vector<double> t;        // mass under the clean point
  std::vector<double> t_tilde;  // mass under the perturbed point
};

enum class Direction { kMin, kMax };

// B^{-1}: L1 / L2 are symmetric; BinaryFlip swaps r_add and r_del.
ThreatModel invert_ball(const ThreatModel& ball);

// Throws ValidationError unless the pair is one of Gaussian + L1/L2,
// Uniform + L1, Sparse + BinaryFlip.
void check_compatible(const SmoothingScheme& scheme, const ThreatModel& ball);

RegionTable build_region_table(const SmoothingScheme& scheme,
                               const ThreatModel& ball);

// Optimal value of min / max h.t_tilde s.t. h.t = p, h in [0, 1]^K (a
// fractional knapsack). Regions are filled greedily in likelihood-ratio order
// with one fractional region.
Probability greedy_lp(const RegionTable& table, Probability p,
                      Direction direction);

// Certified worst-case lower bound c_down[p, B] on the pass probability at
// any point of `ball` around x, given pass probability p at x.
Probability cert_lower(Probability p, const SmoothingScheme& scheme,
                       const ThreatModel& ball);

// Certified best-case upper bound c_up[p, B]; callers pass B^{-1} when
// bounding the clean point from a perturbed one.
Probability cert_upper(Probability p, const SmoothingScheme& scheme,
                       const ThreatModel& ball);

}  // namespace bincp

#endif  // BINCP_CERTIFY_H_
