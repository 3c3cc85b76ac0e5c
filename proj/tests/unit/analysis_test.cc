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

#include "bestexp/analysis.h"

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

ModelClass TwoEntry() {
  return ModelClass({{MeasureSpec::Bernoulli(Q(1, 2)), 1}, {MeasureSpec::Bernoulli(Q(3, 4)), 2}});
}

ModelClass MixedClass() {
  return ModelClass({{MeasureSpec::Bernoulli(Q(1, 2)), 2},
                     {MeasureSpec::Bernoulli(Q(1, 5)), 3},
                     {MeasureSpec::Markov1(Q(1, 4), Q(3, 4), Q(1, 2)), 3},
                     {MeasureSpec::Bernoulli(Q(7, 8)), 4}});
}

// Sum over all contexts of length < depth of P(x) (H(0|x) - P(0|x))^2, by
// calling the one-shot predictors on every string.
double ExpectedErrorOracle(const ModelClass& mc, int truth, bool mdl, int depth) {
  double total = 0.0;
  const auto& p = mc.entry(truth).spec;
  for (int len = 0; len < depth; ++len) {
    for (unsigned long long code = 0; code < (1ULL << len); ++code) {
      const BitString x = BitString::FromString(oracle::BitsOf(code, len));
      const Rational px = MeasureProb(p, x).exact;
      if (sgn(px) == 0) continue;
      const double h = mdl ? MdlPredict(mc, x, 0) : MixturePredict(mc, x, 0);
      const double t = CondProb(p, x, 0);
      total += px.get_d() * (h - t) * (h - t);
    }
  }
  return total;
}

TEST(VovkBoundCheckTest, HandValue) {
  const ModelClass ext = ModelClass::WithPairwiseAverages(TwoEntry());
  const BoundReport r = VovkBoundCheck(ext, 0, 1, BitString::FromString("1111"));
  EXPECT_DOUBLE_EQ(r.sum, 0.1875);
  EXPECT_EQ(*r.K_pair, 5.0);
  EXPECT_TRUE(r.pass) << r.failed_link;
  EXPECT_GE(r.slack, 0.0);
}

TEST(VovkBoundCheckTest, NeedsAverage) {
  EXPECT_EQ(KindOf([] { VovkBoundCheck(TwoEntry(), 0, 1, BitString::FromString("11")); }),
            ErrorKind::kDomain);
  const BoundReport same = VovkBoundCheck(TwoEntry(), 1, 1, BitString::FromString("11"));
  EXPECT_EQ(same.sum, 0.0);
  EXPECT_TRUE(same.pass);
}

TEST(VovkBoundCheckTest, ChainHoldsOnSampledSequences) {
  const ModelClass ext = ModelClass::WithPairwiseAverages(MixedClass());
  for (int p = 0; p < 4; ++p) {
    for (int q = 0; q < 4; ++q) {
      for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const BitString x = SampleSequence(ext.entry(p).spec, 50 + 40 * seed, seed * 31 + p);
        const BoundReport r = VovkBoundCheck(ext, p, q, x);
        EXPECT_TRUE(r.pass) << p << " " << q << " " << seed << " " << r.failed_link;
        // link ii: log2 c <= 2 log2 C + 2 K
        EXPECT_LE(*r.log2_c, 2 * *r.log2_C + 2 * *r.K_pair + 1e-9);
      }
    }
  }
}

TEST(ExpectedSqErrorTest, HandValues) {
  const ModelClass mc = TwoEntry();
  EXPECT_EQ(ExpectedSqError(mc, 0, MdlPredictor{}, 2), 0.0);
  EXPECT_NEAR(ExpectedSqError(mc, 0, MixturePredictor{}, 1), 1.0 / 144.0, 1e-15);
  EXPECT_EQ(ExpectedSqError(mc, 0, MdlPredictor{}, 0), 0.0);
}

TEST(ExpectedSqErrorTest, MatchesPerStringOracle) {
  const ModelClass mc = MixedClass();
  for (int truth = 0; truth < 4; ++truth) {
    for (bool mdl : {true, false}) {
      const Predictor pred = mdl ? Predictor(MdlPredictor{}) : Predictor(MixturePredictor{});
      const double got = ExpectedSqError(mc, truth, pred, 9);
      EXPECT_NEAR(got, ExpectedErrorOracle(mc, truth, mdl, 9), 1e-12) << truth << mdl;
    }
  }
}

TEST(ExpectedSqErrorTest, MatchesMonteCarloTraces) {
  const ModelClass mc = MixedClass();
  const int depth = 10;
  for (int truth : {0, 2}) {
    const double exact = ExpectedSqError(mc, truth, MdlPredictor{}, depth);
    double sum = 0.0, sum_sq = 0.0;
    const int seeds = 10000;
    for (int s = 0; s < seeds; ++s) {
      const BitString omega = SampleSequence(mc.entry(truth).spec, depth, 5000 + s);
      const double v = Trace(MdlPredictor{}, truth, mc, omega).cumulative();
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / seeds;
    const double se = std::sqrt(std::max(0.0, sum_sq / seeds - mean * mean) / seeds);
    EXPECT_LE(std::abs(mean - exact), 3 * se + 1e-12) << truth << " mean " << mean;
  }
}

TEST(ExpectedSqErrorTest, NonDecreasingAndZeroForTruth) {
  const ModelClass mc = MixedClass();
  for (int truth = 0; truth < 4; ++truth) {
    double prev = 0.0;
    for (int d = 0; d <= 10; ++d) {
      const double v = ExpectedSqError(mc, truth, MdlPredictor{}, d);
      EXPECT_GE(v, prev);
      prev = v;
      EXPECT_EQ(ExpectedSqError(mc, truth, SinglePredictor{truth}, d), 0.0);
    }
  }
}

TEST(ExpectedSqErrorTest, IncrementsSumToTotal) {
  const ModelClass mc = MixedClass();
  const auto inc = ExpectedSqErrorIncrements(mc, 2, MdlPredictor{}, 10);
  ASSERT_EQ(inc.size(), 10u);
  double sum = 0;
  for (int d = 1; d <= 10; ++d) {
    sum += inc[static_cast<std::size_t>(d - 1)];
    EXPECT_NEAR(sum, ExpectedSqError(mc, 2, MdlPredictor{}, d), 1e-12);
  }
}

TEST(ExpectedSqErrorTest, SingletonIsZeroAndDepthCapped) {
  const ModelClass one({{MeasureSpec::Markov1(Q(1, 3), Q(2, 3), Q(1, 2)), 0}});
  for (int d = 0; d <= 12; ++d) {
    EXPECT_EQ(ExpectedSqError(one, 0, MdlPredictor{}, d), 0.0);
    EXPECT_EQ(ExpectedSqError(one, 0, MixturePredictor{}, d), 0.0);
  }
  EXPECT_EQ(KindOf([&] { ExpectedSqError(one, 0, MdlPredictor{}, 21); }),
            ErrorKind::kDepthExceeded);
  EXPECT_EQ(KindOf([&] { ExpectedSqError(one, 0, MdlPredictor{}, 8, 6); }),
            ErrorKind::kDepthExceeded);
}

TEST(PerSequenceBoundTest, PassesOnSamples) {
  const ModelClass mc = MixedClass();
  for (int truth = 0; truth < 4; ++truth) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const BitString omega = SampleSequence(mc.entry(truth).spec, 600, seed);
      const PerSequenceReport r = PerSequenceBound(mc, truth, omega);
      EXPECT_TRUE(r.report.pass) << truth << " " << seed << " " << r.report.failed_link;
      EXPECT_TRUE(r.cutoff_ok);
      EXPECT_TRUE(r.count_ok);
      EXPECT_LE(std::log2(static_cast<double>(r.models.size())), r.count_exponent + 1e-12);
      EXPECT_DOUBLE_EQ(r.report.sum, r.trace.cumulative());
      std::size_t picks = 0;
      for (const auto& m : r.models) {
        EXPECT_TRUE(m.links_ok);
        EXPECT_LE(m.lemma_sum, m.lemma_bound + 1e-9);
        picks += m.times_selected;
      }
      EXPECT_EQ(picks, omega.size());
      EXPECT_DOUBLE_EQ(*r.report.D, DeficiencyProfile(mc, truth, omega).sup);
    }
  }
}

TEST(KlChainCheckTest, IdentityPinskerDomination) {
  const ModelClass mc = MixedClass();
  for (int truth = 0; truth < 4; ++truth) {
    for (const Predictor& pred : {Predictor(MixturePredictor{}), Predictor(MdlPredictor{})}) {
      const KlChainReport r = KlChainCheck(mc, truth, pred, 10);
      ASSERT_EQ(r.levels.size(), 11u);
      EXPECT_EQ(r.levels[0].kl_direct, 0.0);
      EXPECT_LT(r.max_chain_error, 1e-9);
      EXPECT_TRUE(r.pinsker_ok);
      EXPECT_TRUE(r.pass()) << truth;
    }
  }
}

TEST(KlChainCheckTest, DirectValueMatchesEnumeration) {
  const ModelClass mc = TwoEntry();
  const int k = 6;
  double want = 0.0;
  for (unsigned long long code = 0; code < (1ULL << k); ++code) {
    const std::string s = oracle::BitsOf(code, k);
    const BitString x = BitString::FromString(s);
    const double p = MeasureProb(mc.entry(1).spec, x).exact.get_d();
    double m = 1.0;
    for (int i = 0; i < k; ++i) m *= MixturePredict(mc, x.Prefix(static_cast<std::size_t>(i)), x[i]);
    want += p * std::log2(p / m);
  }
  const KlChainReport r = KlChainCheck(mc, 1, MixturePredictor{}, k);
  EXPECT_NEAR(r.levels[k].kl_direct, want, 1e-12);
  // M = xi / xi(empty) and P <= 2^L(P) xi, so KL <= L(P) + log2 xi(empty).
  EXPECT_LE(r.levels[k].kl_direct, 2.0 + std::log2(0.75) + 1e-12);
}

TEST(BoundValuesTest, HandValues) {
  EXPECT_NEAR(BoundValues(0, 0.0, 3.0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(BoundValues(1, 1.0, 3.0), 3.0 * std::exp2(2.5), 1e-12);
  EXPECT_EQ(BoundValues(2, -3.0, 3.0), 0.0);
  EXPECT_EQ(KindOf([] { BoundValues(1, -3.0, 3.0); }), ErrorKind::kDomain);
  EXPECT_EQ(KindOf([] { BoundValues(1, 0.0, 1.0); }), ErrorKind::kDomain);
}

TEST(DeficiencyShellsTest, Counts) {
  const std::vector<double> sups{0.5, 1.5, 2.5, 0.2};
  const auto rows = DeficiencyShells(sups);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].tail_count, 4u);
  EXPECT_EQ(rows[0].shell_count, 2u);
  EXPECT_EQ(rows[1].tail_count, 2u);
  EXPECT_EQ(rows[2].tail_count, 1u);
  EXPECT_DOUBLE_EQ(rows[2].mass_bound, 0.25);
  for (const auto& r : rows) EXPECT_TRUE(r.pass);
  const std::vector<double> heavy(100, 3.2);
  EXPECT_FALSE(DeficiencyShells(heavy)[3].pass);
}

}  // namespace
}  // namespace bestexp
