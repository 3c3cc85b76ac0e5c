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

#ifndef BESTEXP_NUMKERNEL_H_
#define BESTEXP_NUMKERNEL_H_

#include <gmpxx.h>

#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "bestexp/bound_report.h"

namespace bestexp {

// Exact rational; parameters and cylinder masses live here.
using Rational = mpq_class;

// Parses "num/den" or "num" into a canonical rational. Throws kParse.
Rational ParseRational(std::string_view text);
std::string FormatRational(const Rational& value);

// A strictly positive rational in reduced form.
class PosRational {
 public:
  explicit PosRational(const Rational& value);
  PosRational(long numerator, long denominator);

  static PosRational FromString(std::string_view text);

  const Rational& value() const { return value_; }
  std::string ToString() const { return FormatRational(value_); }

 private:
  Rational value_;
};

// Binary logarithm of a probability; -infinity encodes probability zero.
struct LogProb {
  double value = 0.0;

  static constexpr LogProb Zero() {
    return LogProb{-std::numeric_limits<double>::infinity()};
  }
  bool is_zero() const {
    return value == -std::numeric_limits<double>::infinity();
  }
};

// log2 r with relative error below 2^-50; exact on powers of two.
LogProb Log2Of(const PosRational& r);

// log2 of a non-negative rational, -infinity at zero.
double Log2Exact(const Rational& r);

inline constexpr double kLn2 = 0.693147180559945309417232121458176568;

// log2((p+q)/2) - (log2 p + log2 q)/2 for p, q in (0, 1].
double ConvexGap(double p, double q);

// (p-q)^2 / (8 ln 2), the quadratic floor of ConvexGap.
double ConvexGapFloor(double p, double q);

// Compares sum_i (p_i - q_i)^2 against 4 ln2 log2 c, where
// c = (prod_i (p_i+q_i)/2)^2 / prod_i p_i q_i. Entries must lie in (0, 1].
BoundReport ConvexnCheck(std::span<const double> ps, std::span<const double> qs);

// Binary KL divergence between Bernoulli(p) and Bernoulli(q), in bits.
// q must lie in (0, 1); 0 log 0 is taken as 0.
double KlBernoulli(double p, double q);

// (2 / ln 2) (p - q)^2, the Pinsker floor of KlBernoulli in bits.
double PinskerFloor(double p, double q);

}  // namespace bestexp

#endif  // BESTEXP_NUMKERNEL_H_
