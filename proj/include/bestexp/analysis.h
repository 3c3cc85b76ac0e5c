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

#ifndef BESTEXP_ANALYSIS_H_
#define BESTEXP_ANALYSIS_H_

#include <span>
#include <vector>

#include "bestexp/bound_report.h"
#include "bestexp/predictors.h"

namespace bestexp {

// Checks the two-measure error chain at x for class entries P and Q:
//   (i)   R(x) <= 2^K xi(x), R = average(P, Q), K = L(P) + L(Q) + 2
//   (ii)  c = R(x)^2 / (P(x) Q(x)) <= C^2 2^(2K), C = max(xi/P, xi/Q)
//   (iii) sum_{i<n} (p_i - q_i)^2 <= 4 ln2 log2 c <= 8 ln2 (log2 C + K)
// The class must contain average(P, Q) unless p_id == q_id.
BoundReport VovkBoundCheck(const ModelClass& model_class, int p_id, int q_id,
                           const BitString& x);

inline constexpr int kDefaultMaxDepth = 20;

// sum_{|x| < depth} P(x) [P(0|x) - pred(0|x)]^2 by full tree traversal.
double ExpectedSqError(const ModelClass& model_class, int truth, const Predictor& predictor,
                       int depth, int max_depth = kDefaultMaxDepth);

// Element d-1 is the contribution of strings of length d-1, so partial sums
// give ExpectedSqError at each depth 1 .. depth.
std::vector<double> ExpectedSqErrorIncrements(const ModelClass& model_class, int truth,
                                              const Predictor& predictor, int depth,
                                              int max_depth = kDefaultMaxDepth);

struct SelectedModelBound {
  int id = -1;
  std::size_t last_context_length = 0;  // last prefix length where selected
  std::size_t times_selected = 0;
  double log2_C = 0.0;
  double log2_c = 0.0;
  double K_pair = 0.0;
  double lemma_sum = 0.0;   // sum over contexts 0 .. last-1 of (P - Q)^2
  double lemma_bound = 0.0; // 4 ln2 log2 c
  double link_bound = 0.0;  // 8 ln2 (log2 C + K_pair)
  bool links_ok = false;
};

struct PerSequenceReport {
  BoundReport report;  // sum = measured MDL error sum, bound = assembled bound
  std::vector<SelectedModelBound> models;
  double count_exponent = 0.0;  // (gamma L_P + D + 1) / (gamma - 1)
  bool count_ok = false;
  bool cutoff_ok = false;
  double worst_cutoff_slack = 0.0;  // min over steps of rhs - lhs
  PredictionTrace trace;
};

// Runs the MDL predictor along omega and assembles the per-sequence bound
// sum_{Q in U} [8 ln2 (log2 C_Q + K_Q)] + |U| over the set U of selected
// entries, checking the candidate cutoff (gamma-1) L(Q) <= gamma L_P + D + 1
// at every step.
PerSequenceReport PerSequenceBound(const ModelClass& model_class, int truth,
                                   const BitString& omega, double gamma = 3.0);

struct KlChainLevel {
  int k = 0;
  double kl_direct = 0.0;     // KL(P_k || M_k) by enumeration
  double kl_chain = 0.0;      // telescoped expected one-step divergences
  double pinsker_sum = 0.0;   // sum_{|x|<k} P(x) (P(0|x) - M(0|x))^2
  double pinsker_bound = 0.0; // (ln2 / 2) KL(P_k || M_k)
  double log2_C = 0.0;        // max_{|x|<=k} log2 P(x)/M(x)
};

struct KlChainReport {
  std::vector<KlChainLevel> levels;  // k = 0 .. requested depth
  double max_chain_error = 0.0;
  bool chain_ok = false;
  bool pinsker_ok = false;
  bool domination_ok = false;
  bool pass() const { return chain_ok && pinsker_ok && domination_ok; }
};

inline constexpr int kMaxKlDepth = 16;

// KL between the length-k marginals of P and of the predictor's implied
// process M, M(x) = prod_i M(x_i | x_1 ... x_{i-1}).
KlChainReport KlChainCheck(const ModelClass& model_class, int p_id, const Predictor& predictor,
                           int k);

// (L_P + D + 1) 2^((gamma L_P + D + 1) / (gamma - 1)). A shape reference
// for reporting, not a certified constant.
double BoundValues(int l_p, double d, double gamma = 3.0);

struct ShellRow {
  int d = 0;
  std::size_t shell_count = 0;  // sequences with D in [d, d+1)
  std::size_t tail_count = 0;   // sequences with D >= d
  double tail_fraction = 0.0;
  double mass_bound = 0.0;      // 2^-d
  double tolerance = 0.0;       // three binomial standard errors at the bound
  bool pass = false;
};

// Monte Carlo check that P(D >= d) <= 2^-d over a sample of deficiency
// suprema; rows for d = 0 .. floor(max D).
std::vector<ShellRow> DeficiencyShells(std::span<const double> sups);

}  // namespace bestexp

#endif  // BESTEXP_ANALYSIS_H_
