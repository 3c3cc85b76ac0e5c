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

#include "bestexp/numkernel.h"

#include <gmp.h>

#include <cctype>
#include <cmath>
#include <string>

#include "bestexp/error.h"

namespace bestexp {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kDepthExceeded: return "depth exceeds precision";
    case ErrorKind::kZeroContext: return "zero-probability context";
    case ErrorKind::kZeroProbability: return "zero probability";
    case ErrorKind::kNoExplanation: return "no explanation";
    case ErrorKind::kKraft: return "Kraft violation";
    case ErrorKind::kNotAMeasure: return "not a measure";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kBoundViolation: return "bound violation";
  }
  return "error";
}

Rational ParseRational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw Error(ErrorKind::kParse, "empty rational");
  for (char ch : s) {
    if (!(std::isdigit(static_cast<unsigned char>(ch)) || ch == '/' || ch == '-')) {
      throw Error(ErrorKind::kParse, "bad rational '" + s + "'");
    }
  }
  Rational r;
  if (r.set_str(s, 10) != 0) throw Error(ErrorKind::kParse, "bad rational '" + s + "'");
  if (r.get_den() == 0) throw Error(ErrorKind::kParse, "zero denominator in '" + s + "'");
  r.canonicalize();
  return r;
}

std::string FormatRational(const Rational& value_in) {
  Rational value = value_in;
  value.canonicalize();
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

PosRational::PosRational(const Rational& value) : value_(value) {
  value_.canonicalize();
  if (sgn(value_) <= 0) {
    throw Error(ErrorKind::kDomain, "PosRational must be > 0, got " + FormatRational(value_));
  }
}

PosRational::PosRational(long numerator, long denominator)
    : PosRational(Rational(numerator, denominator)) {}

PosRational PosRational::FromString(std::string_view text) {
  return PosRational(ParseRational(text));
}

namespace {

// log2 of a positive integer, accurate to a few ulps in absolute terms.
double Log2Integer(const mpz_class& n) {
  long exponent = 0;
  double mantissa = mpz_get_d_2exp(&exponent, n.get_mpz_t());
  return static_cast<double>(exponent) + std::log2(mantissa);
}

}  // namespace

LogProb Log2Of(const PosRational& r) {
  const Rational& v = r.value();
  // Near 1 the exponent split cancels; go through log1p of the offset.
  if (v > Rational(1, 2) && v < Rational(2)) {
    Rational offset = v - 1;
    return LogProb{std::log1p(offset.get_d()) / kLn2};
  }
  return LogProb{Log2Integer(v.get_num()) - Log2Integer(v.get_den())};
}

double Log2Exact(const Rational& r) {
  if (sgn(r) < 0) throw Error(ErrorKind::kDomain, "log of negative rational");
  if (sgn(r) == 0) return LogProb::Zero().value;
  return Log2Of(PosRational(r)).value;
}

double ConvexGap(double p, double q) {
  if (!(p > 0.0 && p <= 1.0) || !(q > 0.0 && q <= 1.0)) {
    throw Error(ErrorKind::kDomain, "ConvexGap needs p, q in (0, 1]");
  }
  // (p+q)^2 / 4pq = 1 / (1 - h^2) with h = (p-q)/(p+q); this form has no
  // cancellation when p and q are close. Far apart, h^2 rounds to 1 and the
  // direct difference of logs is the accurate one.
  const double h = (p - q) / (p + q);
  if (h * h < 0.5) return -0.5 * std::log1p(-h * h) / kLn2;
  return std::log2(0.5 * p + 0.5 * q) - 0.5 * (std::log2(p) + std::log2(q));
}

double ConvexGapFloor(double p, double q) {
  const double d = p - q;
  return d * d / (8.0 * kLn2);
}

BoundReport ConvexnCheck(std::span<const double> ps, std::span<const double> qs) {
  if (ps.size() != qs.size() || ps.empty()) {
    throw Error(ErrorKind::kDomain, "ConvexnCheck needs equal non-empty lengths");
  }
  double log2_c = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    // log c = 2 * sum of per-coordinate gaps.
    log2_c += 2.0 * ConvexGap(ps[i], qs[i]);
    const double d = ps[i] - qs[i];
    sum += d * d;
  }
  BoundReport report;
  report.log2_c = log2_c;
  report.sum = sum;
  report.bound = 4.0 * kLn2 * log2_c;
  report.Finish();
  return report;
}

double KlBernoulli(double p, double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::kDomain, "KlBernoulli needs q in (0, 1)");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::kDomain, "KlBernoulli needs p in [0, 1]");
  if (p == q) return 0.0;
  double kl = 0.0;
  if (p > 0.0) kl += p * std::log2(p / q);
  if (p < 1.0) kl += (1.0 - p) * std::log2((1.0 - p) / (1.0 - q));
  return kl < 0.0 ? 0.0 : kl;
}

double PinskerFloor(double p, double q) {
  const double d = p - q;
  return 2.0 / kLn2 * d * d;
}

}  // namespace bestexp
