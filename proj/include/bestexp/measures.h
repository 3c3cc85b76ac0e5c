// Copyright 2026 The bestexp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BESTEXP_MEASURES_H_
#define BESTEXP_MEASURES_H_

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bestexp/numkernel.h"

namespace bestexp {

// Finite binary string x = x_1 ... x_n.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::vector<std::uint8_t> bits);

  // Accepts characters '0' and '1' only.
  static BitString FromString(std::string_view text);
  static BitString Repeat(int bit, std::size_t count);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  int operator[](std::size_t i) const { return bits_[i]; }
  void push_back(int bit);

  BitString Prefix(std::size_t length) const;
  BitString Append(int bit) const;
  std::string ToString() const;

  const std::vector<std::uint8_t>& bits() const { return bits_; }
  bool operator==(const BitString&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

enum class Family { kBernoulli, kMarkov1, kInterval, kAverage };

const char* FamilyName(Family family);

class MeasureSpec;

struct BernoulliParams {
  Rational theta;  // probability of a 1
};

// theta_init: P(first bit = 1); theta_after[b]: P(next = 1 | previous = b).
struct Markov1Params {
  Rational theta0;
  Rational theta1;
  Rational theta_init;
};

// Uniform measure restricted to (0, alpha); alpha is dyadic with at most
// precision_bits fractional bits and cylinders deeper than that are refused.
struct IntervalParams {
  Rational alpha;
  int precision_bits = 0;
};

struct AverageParams {
  std::shared_ptr<const MeasureSpec> left;
  std::shared_ptr<const MeasureSpec> right;
};

// First-order transition kernel shared by every measure family. State 0/1
// is the previous bit; state 2 is the empty context.
struct TransitionKernel {
  static constexpr int kInitial = 2;
  std::array<Rational, 3> one;     // P(next = 1 | state)
  std::array<double, 3> one_d{};   // same, as doubles
  std::array<double, 3> log_one{};   // log2 P(1 | state)
  std::array<double, 3> log_zero{};  // log2 P(0 | state)
};

// An immutable member of one of the supported families. Copies share state.
class MeasureSpec {
 public:
  static MeasureSpec Bernoulli(const Rational& theta);
  static MeasureSpec Markov1(const Rational& theta0, const Rational& theta1,
                             const Rational& theta_init);
  static MeasureSpec Interval(const Rational& alpha, int precision_bits);
  static MeasureSpec Average(const MeasureSpec& left, const MeasureSpec& right);

  Family family() const;
  bool IsMeasure() const { return family() != Family::kInterval; }

  const BernoulliParams& bernoulli() const;
  const Markov1Params& markov1() const;
  const IntervalParams& interval() const;
  const AverageParams& average() const;

  // Only for measure families.
  const TransitionKernel& kernel() const;

  const std::optional<std::string>& name() const;
  MeasureSpec WithName(std::string name) const;

  // Name if set, otherwise a canonical description such as
  // "bernoulli(1/2)".
  std::string Describe() const;
  std::string Canonical() const;

  // Structural equality; display names are ignored.
  bool SameAs(const MeasureSpec& other) const;

 private:
  struct Impl;
  explicit MeasureSpec(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Mass of a cylinder, kept both exactly and in log2 form. For measure
// families the two are computed by independent routes (rational powers
// versus sums of parameter logs).
struct ProbValue {
  Rational exact;
  LogProb log;

  static ProbValue FromExact(const Rational& exact);
  bool is_zero() const { return sgn(exact) == 0; }
};

// Walks one spec down the tree a bit at a time; cheap to copy.
class MeasureCursor {
 public:
  explicit MeasureCursor(MeasureSpec spec);

  const MeasureSpec& spec() const { return spec_; }
  std::size_t depth() const { return depth_; }

  // Throws kDepthExceeded when an interval spec reaches its horizon.
  void Push(int bit);
  bool CanPush() const;

  double LogProb() const;
  Rational ExactProb() const;
  ProbValue Prob() const;
  bool IsZero() const;

  // P(xb) / P(x) at the current node. Throws kZeroContext if P(x) = 0.
  double CondProb(int bit) const;
  Rational CondProbExact(int bit) const;

 private:
  struct KernelState {
    KernelState() {}
    int last = TransitionKernel::kInitial;
    int first = -1;
    std::array<std::array<std::uint64_t, 2>, 2> counts{};
  };
  struct IntervalState {
    mpz_class alpha_units;  // alpha * 2^bits
    mpz_class low_units;    // left end of the cylinder * 2^bits
  };

  mpz_class IntervalMassUnits(const mpz_class& low, int depth) const;

  MeasureSpec spec_;
  std::size_t depth_ = 0;
  std::variant<KernelState, IntervalState> state_;
};

ProbValue MeasureProb(const MeasureSpec& spec, const BitString& x);
double MeasureLogProb(const MeasureSpec& spec, const BitString& x);
double CondProb(const MeasureSpec& spec, const BitString& x, int bit);
Rational CondProbExact(const MeasureSpec& spec, const BitString& x, int bit);

// The measure whose conditional at every node is the mean of the two
// inputs' conditionals. Rejects semimeasures.
MeasureSpec AverageMeasure(const MeasureSpec& p, const MeasureSpec& q);

// Deterministic in (spec, n, seed); bit i is 1 with probability
// P(1 | x_1 ... x_{i-1}) up to 2^-64 quantization. Rejects semimeasures.
BitString SampleSequence(const MeasureSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace bestexp

#endif  // BESTEXP_MEASURES_H_
