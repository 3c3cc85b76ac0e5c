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

#include "bestexp/measures.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "oracles.h"
#include "test_util.h"

namespace bestexp {
namespace {

Rational Q(long a, long b) { return Rational(a, b); }

std::vector<MeasureSpec> SampleSpecs() {
  return {MeasureSpec::Bernoulli(Q(1, 2)), MeasureSpec::Bernoulli(Q(3, 4)),
          MeasureSpec::Bernoulli(Q(1, 3)), MeasureSpec::Bernoulli(Q(1, 1)),
          MeasureSpec::Markov1(Q(1, 3), Q(3, 4), Q(1, 2)),
          MeasureSpec::Markov1(Q(0, 1), Q(5, 7), Q(2, 9)),
          MeasureSpec::Average(MeasureSpec::Bernoulli(Q(1, 2)), MeasureSpec::Bernoulli(Q(3, 4))),
          MeasureSpec::Average(MeasureSpec::Markov1(Q(1, 5), Q(4, 5), Q(1, 2)),
                               MeasureSpec::Bernoulli(Q(2, 3)))};
}

TEST(BitStringTest, ParseAndPrint) {
  const BitString x = BitString::FromString("0110");
  EXPECT_EQ(x.size(), 4u);
  EXPECT_EQ(x[1], 1);
  EXPECT_EQ(x.ToString(), "0110");
  EXPECT_EQ(x.Prefix(2).ToString(), "01");
  EXPECT_EQ(x.Append(1).ToString(), "01101");
  EXPECT_EQ(BitString::Repeat(1, 3).ToString(), "111");
  EXPECT_EQ(KindOf([] { BitString::FromString("012"); }), ErrorKind::kParse);
}

TEST(MeasureSpecTest, Validation) {
  EXPECT_EQ(KindOf([] { MeasureSpec::Bernoulli(Q(3, 2)); }), ErrorKind::kDomain);
  EXPECT_EQ(KindOf([] { MeasureSpec::Markov1(Q(1, 2), Q(-1, 2), Q(1, 2)); }),
            ErrorKind::kDomain);
  EXPECT_EQ(KindOf([] { MeasureSpec::Interval(Q(3, 5), 8); }), ErrorKind::kDomain);
  EXPECT_EQ(KindOf([] { MeasureSpec::Interval(Q(0, 1), 8); }), ErrorKind::kDomain);
  EXPECT_EQ(KindOf([] { MeasureSpec::Interval(Q(1, 32), 4); }), ErrorKind::kDomain);
  EXPECT_EQ(KindOf([] { MeasureSpec::Average(MeasureSpec::Interval(Q(1, 2), 4),
                                             MeasureSpec::Bernoulli(Q(1, 2))); }),
            ErrorKind::kNotAMeasure);
}

TEST(MeasureSpecTest, DescribeAndSameAs) {
  const auto b = MeasureSpec::Bernoulli(Q(2, 4));
  EXPECT_EQ(b.Describe(), "bernoulli(1/2)");
  EXPECT_EQ(b.WithName("fair").Describe(), "fair");
  EXPECT_TRUE(b.SameAs(b.WithName("fair")));
  EXPECT_FALSE(b.SameAs(MeasureSpec::Bernoulli(Q(1, 3))));
  EXPECT_FALSE(b.SameAs(MeasureSpec::Markov1(Q(1, 2), Q(1, 2), Q(1, 2))));
}

TEST(MeasureProbTest, HandValues) {
  EXPECT_EQ(MeasureProb(MeasureSpec::Bernoulli(Q(3, 4)), BitString::FromString("1101")).exact,
            Q(27, 256));
  EXPECT_EQ(MeasureProb(MeasureSpec::Markov1(Q(1, 3), Q(3, 4), Q(1, 2)),
                        BitString::FromString("011"))
                .exact,
            Q(1, 8));
  EXPECT_EQ(MeasureProb(MeasureSpec::Bernoulli(Q(1, 2)), BitString()).exact, Q(1, 1));
}

TEST(MeasureProbTest, AverageUsesMeanConditionals) {
  const auto r =
      MeasureSpec::Average(MeasureSpec::Bernoulli(Q(1, 2)), MeasureSpec::Bernoulli(Q(3, 4)));
  EXPECT_EQ(MeasureProb(r, BitString::FromString("1")).exact, Q(5, 8));
  // Not the 50/50 mixture, which would give 13/32.
  EXPECT_EQ(MeasureProb(r, BitString::FromString("11")).exact, Q(25, 64));
  EXPECT_EQ(CondProbExact(r, BitString::FromString("1"), 0), Q(3, 8));
}

TEST(MeasureProbTest, AgreesWithStepwiseProducts) {
  std::mt19937_64 gen(3);
  const mpq_class t0(1, 3), t1(3, 4), init(1, 2);
  const auto b = MeasureSpec::Bernoulli(Q(2, 7));
  const auto m = MeasureSpec::Markov1(t0, t1, init);
  for (int t = 0; t < 50; ++t) {
    std::string s;
    const int n = static_cast<int>(gen() % 120);
    for (int i = 0; i < n; ++i) s.push_back((gen() & 1) ? '1' : '0');
    const BitString x = BitString::FromString(s);
    EXPECT_EQ(MeasureProb(b, x).exact, oracle::BernoulliProduct(mpq_class(2, 7), s));
    EXPECT_EQ(MeasureProb(m, x).exact, oracle::Markov1Product(t0, t1, init, s));
  }
}

TEST(MeasureProbTest, LogPathMatchesExact) {
  std::mt19937_64 gen(5);
  for (const auto& spec : SampleSpecs()) {
    for (int t = 0; t < 30; ++t) {
      std::string s;
      const int n = 1 + static_cast<int>(gen() % 400);
      for (int i = 0; i < n; ++i) s.push_back((gen() % 3 == 0) ? '0' : '1');
      const BitString x = BitString::FromString(s);
      const ProbValue pv = MeasureProb(spec, x);
      const double lp = MeasureLogProb(spec, x);
      if (pv.is_zero()) {
        EXPECT_TRUE(std::isinf(lp) && lp < 0) << spec.Describe() << " " << s;
        continue;
      }
      const double want = static_cast<double>(oracle::Log2(oracle::FromMpq(pv.exact)));
      EXPECT_NEAR(lp, want, 1e-10 * std::max(1.0, std::abs(want))) << spec.Describe();
    }
  }
}

TEST(MeasureProbTest, CylinderAdditivity) {
  for (const auto& spec : SampleSpecs()) {
    for (int len = 0; len <= 7; ++len) {
      for (unsigned long long code = 0; code < (1ULL << len); ++code) {
        const BitString x = BitString::FromString(oracle::BitsOf(code, len));
        EXPECT_EQ(MeasureProb(spec, x.Append(0)).exact + MeasureProb(spec, x.Append(1)).exact,
                  MeasureProb(spec, x).exact)
            << spec.Describe() << " " << x.ToString();
      }
    }
  }
}

TEST(IntervalTest, MassesAndCertainty) {
  const auto q = MeasureSpec::Interval(Q(5, 8), 4);
  EXPECT_EQ(MeasureProb(q, BitString()).exact, Q(5, 8));
  EXPECT_EQ(MeasureProb(q, BitString::FromString("0")).exact, Q(1, 2));
  EXPECT_EQ(MeasureProb(q, BitString::FromString("1")).exact, Q(1, 8));
  EXPECT_EQ(MeasureProb(q, BitString::FromString("10")).exact, Q(1, 8));
  EXPECT_EQ(MeasureProb(q, BitString::FromString("11")).exact, Q(0, 1));
  EXPECT_EQ(CondProbExact(q, BitString::FromString("1"), 0), Q(1, 1));
  EXPECT_EQ(KindOf([&] { CondProbExact(q, BitString::FromString("11"), 0); }),
            ErrorKind::kZeroContext);
}

TEST(IntervalTest, SemimeasureInequality) {
  const auto q = MeasureSpec::Interval(Q(181, 256), 10);
  for (int len = 0; len <= 8; ++len) {
    for (unsigned long long code = 0; code < (1ULL << len); ++code) {
      const BitString x = BitString::FromString(oracle::BitsOf(code, len));
      EXPECT_LE(MeasureProb(q, x.Append(0)).exact + MeasureProb(q, x.Append(1)).exact,
                MeasureProb(q, x).exact);
    }
  }
}

TEST(IntervalTest, DepthHorizon) {
  MeasureCursor c(MeasureSpec::Interval(Q(1, 2), 3));
  c.Push(0);
  c.Push(1);
  EXPECT_FALSE(c.CanPush());
  EXPECT_EQ(KindOf([&] { c.Push(0); }), ErrorKind::kDepthExceeded);
}

TEST(MeasureCursorTest, MatchesFreeFunctions) {
  std::mt19937_64 gen(9);
  for (const auto& spec : SampleSpecs()) {
    MeasureCursor c(spec);
    BitString x;
    for (int i = 0; i < 60; ++i) {
      EXPECT_EQ(c.ExactProb(), MeasureProb(spec, x).exact);
      if (!c.IsZero()) {
        EXPECT_EQ(c.CondProbExact(1), CondProbExact(spec, x, 1));
        EXPECT_NEAR(c.CondProb(0) + c.CondProb(1), 1.0, 1e-12);
      }
      const int bit = static_cast<int>(gen() & 1);
      c.Push(bit);
      x.push_back(bit);
    }
  }
}

TEST(SampleSequenceTest, DeterministicAndDegenerate) {
  const auto b = MeasureSpec::Bernoulli(Q(1, 3));
  EXPECT_EQ(SampleSequence(b, 500, 42), SampleSequence(b, 500, 42));
  EXPECT_NE(SampleSequence(b, 500, 42), SampleSequence(b, 500, 43));
  EXPECT_EQ(SampleSequence(MeasureSpec::Bernoulli(Q(1, 1)), 64, 1), BitString::Repeat(1, 64));
  EXPECT_EQ(SampleSequence(MeasureSpec::Bernoulli(Q(0, 1)), 64, 1), BitString::Repeat(0, 64));
  EXPECT_EQ(KindOf([] { SampleSequence(MeasureSpec::Interval(Q(1, 2), 8), 4, 0); }),
            ErrorKind::kNotAMeasure);
}

TEST(SampleSequenceTest, Frequencies) {
  const std::size_t n = 200000;
  const BitString x = SampleSequence(MeasureSpec::Bernoulli(Q(1, 3)), n, 7);
  std::size_t ones = 0;
  for (std::size_t i = 0; i < n; ++i) ones += x[i];
  const double se = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
  EXPECT_NEAR(static_cast<double>(ones), n / 3.0, 5 * se);

  // Markov chain: empirical P(1 | previous 1).
  const BitString y = SampleSequence(MeasureSpec::Markov1(Q(1, 4), Q(4, 5), Q(1, 2)), n, 8);
  std::size_t after1 = 0, ones_after1 = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (y[i - 1] == 1) {
      ++after1;
      ones_after1 += y[i];
    }
  }
  EXPECT_NEAR(static_cast<double>(ones_after1) / after1, 0.8, 0.01);
}

}  // namespace
}  // namespace bestexp
