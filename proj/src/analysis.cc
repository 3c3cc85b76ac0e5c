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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "bestexp/error.h"

namespace bestexp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTol = BoundReport::kTolerance;

void RequirePositive(double log_value, const char* what) {
  if (log_value == kNegInf) {
    throw Error(ErrorKind::kZeroProbability, std::string(what) + " assigns probability 0 to x");
  }
}

}  // namespace

BoundReport VovkBoundCheck(const ModelClass& model_class, int p_id, int q_id,
                           const BitString& x) {
  const auto& p_entry = model_class.entry(p_id);
  const auto& q_entry = model_class.entry(q_id);
  if (!p_entry.spec.IsMeasure() || !q_entry.spec.IsMeasure()) {
    throw Error(ErrorKind::kNotAMeasure, "Lemma chain needs two measures");
  }
  int r_id = p_id;
  if (p_id != q_id) {
    const auto found = model_class.FindAverage(p_id, q_id);
    if (!found) {
      throw Error(ErrorKind::kDomain, "class lacks average(" + std::to_string(p_id) + ", " +
                                          std::to_string(q_id) +
                                          "); build it with WithPairwiseAverages");
    }
    r_id = *found;
  }

  ClassCursor cursor(model_class);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int bit = x[i];
    const double p = cursor.cursor(p_id).CondProb(bit);
    const double q = cursor.cursor(q_id).CondProb(bit);
    if (i + 1 < x.size()) sum += (p - q) * (p - q);
    cursor.Push(bit);
  }
  const double log_p = cursor.EntryLogProb(p_id);
  const double log_q = cursor.EntryLogProb(q_id);
  RequirePositive(log_p, "P");
  RequirePositive(log_q, "Q");
  const double log_r = p_id == q_id ? log_p : cursor.EntryLogProb(r_id);
  const double log_xi = cursor.MixtureLogProb();
  const double k_pair = model_class.PairCodeLength(p_id, q_id);

  BoundReport report;
  report.L_P = p_entry.code_length;
  report.L_Q = q_entry.code_length;
  report.K_pair = k_pair;
  report.log2_C = std::max(log_xi - log_p, log_xi - log_q);
  report.log2_c = p_id == q_id ? 0.0 : 2.0 * log_r - log_p - log_q;
  report.sum = sum;
  report.bound = 8.0 * kLn2 * (*report.log2_C + k_pair);

  if (log_r > k_pair + log_xi + kTol) {
    report.failed_link = "i";
  } else if (*report.log2_c > 2.0 * *report.log2_C + 2.0 * k_pair + kTol) {
    report.failed_link = "ii";
  } else if (sum > 4.0 * kLn2 * *report.log2_c + kTol ||
             4.0 * kLn2 * *report.log2_c > report.bound + kTol) {
    report.failed_link = "iii";
  }
  report.Finish();
  return report;
}

// ---------------------------------------------------------------------------
// Expected squared error by enumeration

namespace {

void CheckDepth(int depth, int max_depth) {
  if (depth < 0 || depth > max_depth) {
    throw Error(ErrorKind::kDepthExceeded, "depth " + std::to_string(depth) +
                                               " outside [0, " + std::to_string(max_depth) + "]");
  }
}

void Accumulate(SequencePredictor& seq, int truth, int level, int depth,
                std::vector<double>& increments) {
  const MeasureCursor& p = seq.cursor().cursor(truth);
  const double log_p = p.LogProb();
  if (log_p == kNegInf) return;
  const double truth0 = p.CondProb(0);
  const double pred0 = seq.PredictZero();
  const double d = truth0 - pred0;
  increments[static_cast<std::size_t>(level)] += std::exp2(log_p) * d * d;
  if (level + 1 >= depth) return;
  for (int bit = 0; bit < 2; ++bit) {
    SequencePredictor child = seq;
    child.Push(bit);
    Accumulate(child, truth, level + 1, depth, increments);
  }
}

}  // namespace

std::vector<double> ExpectedSqErrorIncrements(const ModelClass& model_class, int truth,
                                              const Predictor& predictor, int depth,
                                              int max_depth) {
  CheckDepth(depth, max_depth);
  if (!model_class.entry(truth).spec.IsMeasure()) {
    throw Error(ErrorKind::kNotAMeasure, "expected error needs a measure as truth");
  }
  std::vector<double> increments(static_cast<std::size_t>(depth), 0.0);
  if (depth == 0) return increments;
  SequencePredictor root(model_class, predictor);
  Accumulate(root, truth, 0, depth, increments);
  return increments;
}

double ExpectedSqError(const ModelClass& model_class, int truth, const Predictor& predictor,
                       int depth, int max_depth) {
  const auto inc = ExpectedSqErrorIncrements(model_class, truth, predictor, depth, max_depth);
  double total = 0.0;
  for (double v : inc) total += v;
  return total;
}

// ---------------------------------------------------------------------------
// Per-sequence bound

PerSequenceReport PerSequenceBound(const ModelClass& model_class, int truth,
                                   const BitString& omega, double gamma) {
  const auto& truth_entry = model_class.entry(truth);
  if (!truth_entry.spec.IsMeasure()) {
    throw Error(ErrorKind::kNotAMeasure, "per-sequence bound needs a measure as truth");
  }
  PerSequenceReport out;
  out.trace = Trace(MdlPredictor{SelectionOptions{gamma, false}}, truth, model_class, omega);
  const DeficiencyReport profile = DeficiencyProfile(model_class, truth, omega);
  const double d_sup = profile.sup;
  const int l_p = truth_entry.code_length;

  // Selected set U with last selection and multiplicity.
  std::map<int, SelectedModelBound> selected;
  out.cutoff_ok = true;
  out.worst_cutoff_slack = std::numeric_limits<double>::infinity();
  const double cutoff_rhs = gamma * l_p + d_sup + 1.0;
  for (const auto& step : out.trace.steps) {
    auto& m = selected[step.selected_id];
    m.id = step.selected_id;
    m.last_context_length = step.step;
    ++m.times_selected;
    const double lhs = (gamma - 1.0) * model_class.entry(step.selected_id).code_length;
    out.worst_cutoff_slack = std::min(out.worst_cutoff_slack, cutoff_rhs - lhs);
    if (lhs > cutoff_rhs + kTol) out.cutoff_ok = false;
  }

  BoundReport& report = out.report;
  report.D = d_sup;
  report.L_P = l_p;
  report.sum = out.trace.cumulative();
  double assembled = 0.0;
  bool links_ok = true;
  const MeasureSpec& p_spec = truth_entry.spec;
  for (auto& [id, m] : selected) {
    const MeasureSpec& q_spec = model_class.entry(id).spec;
    const MeasureSpec r_spec = id == truth ? p_spec : AverageMeasure(p_spec, q_spec);
    ClassCursor cursor(model_class);
    MeasureCursor r(r_spec);
    double lemma_sum = 0.0;
    for (std::size_t i = 0; i < m.last_context_length; ++i) {
      const int bit = omega[i];
      const double p = cursor.cursor(truth).CondProb(bit);
      const double q = cursor.cursor(id).CondProb(bit);
      lemma_sum += (p - q) * (p - q);
      cursor.Push(bit);
      r.Push(bit);
    }
    const double log_p = cursor.EntryLogProb(truth);
    const double log_q = cursor.EntryLogProb(id);
    const double log_xi = cursor.MixtureLogProb();
    m.K_pair = model_class.PairCodeLength(truth, id);
    m.log2_C = std::max(log_xi - log_p, log_xi - log_q);
    m.log2_c = id == truth ? 0.0 : 2.0 * r.LogProb() - log_p - log_q;
    m.lemma_sum = lemma_sum;
    m.lemma_bound = 4.0 * kLn2 * m.log2_c;
    m.link_bound = 8.0 * kLn2 * (m.log2_C + m.K_pair);
    m.links_ok = lemma_sum <= m.lemma_bound + kTol &&
                 m.log2_c <= 2.0 * m.log2_C + 2.0 * m.K_pair + kTol;
    links_ok = links_ok && m.links_ok;
    assembled += m.link_bound + 1.0;
    out.models.push_back(m);
  }
  report.bound = assembled;

  out.count_exponent = (gamma * l_p + d_sup + 1.0) / (gamma - 1.0);
  out.count_ok = std::log2(static_cast<double>(selected.size())) <= out.count_exponent + kTol;

  if (!out.cutoff_ok) report.failed_link = "cutoff";
  else if (!out.count_ok) report.failed_link = "count";
  else if (!links_ok) report.failed_link = "lemma";
  report.Finish();
  return out;
}

// ---------------------------------------------------------------------------
// KL chain rule

namespace {

// Binary KL allowing degenerate q when it matches p.
double KlStep(double p, double q) {
  if (q <= 0.0 || q >= 1.0) {
    if (p == q) return 0.0;
    throw Error(ErrorKind::kDomain, "implied measure is zero where P is positive");
  }
  return KlBernoulli(p, q);
}

struct KlAccumulator {
  std::vector<double> direct;
  std::vector<double> step_kl;    // one-step divergences at level j
  std::vector<double> step_sq;    // one-step squared errors at level j
  std::vector<double> log2_C;
  int k = 0;
  int truth = 0;
};

void KlVisit(SequencePredictor& seq, double log_m, int level, KlAccumulator& acc) {
  const MeasureCursor& p = seq.cursor().cursor(acc.truth);
  const double log_p = p.LogProb();
  if (log_p == kNegInf) return;
  if (log_m == kNegInf) throw Error(ErrorKind::kDomain, "implied measure is zero where P is positive");
  const auto lv = static_cast<std::size_t>(level);
  const double weight = std::exp2(log_p);
  acc.direct[lv] += weight * (log_p - log_m);
  acc.log2_C[lv] = std::max(acc.log2_C[lv], log_p - log_m);
  if (level == acc.k) return;
  const double p0 = p.CondProb(0);
  const double m0 = seq.PredictZero();
  acc.step_kl[lv] += weight * KlStep(p0, m0);
  acc.step_sq[lv] += weight * (p0 - m0) * (p0 - m0);
  for (int bit = 0; bit < 2; ++bit) {
    const double m_bit = bit == 0 ? m0 : 1.0 - m0;
    SequencePredictor child = seq;
    child.Push(bit);
    KlVisit(child, m_bit > 0.0 ? log_m + std::log2(m_bit) : kNegInf, level + 1, acc);
  }
}

}  // namespace

KlChainReport KlChainCheck(const ModelClass& model_class, int p_id, const Predictor& predictor,
                           int k) {
  CheckDepth(k, kMaxKlDepth);
  if (!model_class.entry(p_id).spec.IsMeasure()) {
    throw Error(ErrorKind::kNotAMeasure, "KL chain needs a measure as P");
  }
  KlAccumulator acc;
  acc.k = k;
  acc.truth = p_id;
  const auto levels = static_cast<std::size_t>(k) + 1;
  acc.direct.assign(levels, 0.0);
  acc.step_kl.assign(levels, 0.0);
  acc.step_sq.assign(levels, 0.0);
  acc.log2_C.assign(levels, kNegInf);
  SequencePredictor root(model_class, predictor);
  KlVisit(root, 0.0, 0, acc);

  KlChainReport report;
  report.chain_ok = report.pinsker_ok = report.domination_ok = true;
  double chain = 0.0;
  double sq = 0.0;
  double running_c = kNegInf;
  for (std::size_t j = 0; j < levels; ++j) {
    if (j > 0) {
      chain += acc.step_kl[j - 1];
      sq += acc.step_sq[j - 1];
    }
    running_c = std::max(running_c, acc.log2_C[j]);
    KlChainLevel lv;
    lv.k = static_cast<int>(j);
    lv.kl_direct = acc.direct[j];
    lv.kl_chain = chain;
    lv.pinsker_sum = sq;
    lv.pinsker_bound = kLn2 / 2.0 * lv.kl_direct;
    lv.log2_C = running_c;
    const double err = std::abs(lv.kl_direct - lv.kl_chain);
    report.max_chain_error = std::max(report.max_chain_error, err);
    if (err > kTol) report.chain_ok = false;
    if (lv.pinsker_sum > lv.pinsker_bound + 1e-12) report.pinsker_ok = false;
    if (lv.kl_direct > lv.log2_C + kTol) report.domination_ok = false;
    report.levels.push_back(lv);
  }
  return report;
}

double BoundValues(int l_p, double d, double gamma) {
  if (!(gamma > 1.0)) throw Error(ErrorKind::kDomain, "gamma must be > 1");
  if (d < -l_p - 1.0 - kTol) throw Error(ErrorKind::kDomain, "D below -L_P - 1");
  const double lead = l_p + d + 1.0;
  if (lead <= 0.0) return 0.0;
  return lead * std::exp2((gamma * l_p + d + 1.0) / (gamma - 1.0));
}

std::vector<ShellRow> DeficiencyShells(std::span<const double> sups) {
  std::vector<ShellRow> rows;
  if (sups.empty()) return rows;
  const double top = *std::max_element(sups.begin(), sups.end());
  const int last = std::max(0, static_cast<int>(std::floor(top)));
  const auto n = static_cast<double>(sups.size());
  for (int d = 0; d <= last; ++d) {
    ShellRow row;
    row.d = d;
    for (double v : sups) {
      if (v >= d) ++row.tail_count;
      if (v >= d && v < d + 1) ++row.shell_count;
    }
    row.tail_fraction = static_cast<double>(row.tail_count) / n;
    row.mass_bound = std::exp2(-d);
    row.tolerance = 3.0 * std::sqrt(row.mass_bound * (1.0 - row.mass_bound) / n);
    row.pass = row.tail_fraction <= row.mass_bound + row.tolerance;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bestexp
