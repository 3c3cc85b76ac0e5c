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

#include "bestexp/predictors.h"

#include <gmp.h>

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "bestexp/error.h"

namespace bestexp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kExactRecheckBits = 1e-6;

void CheckGamma(double gamma) {
  if (!(gamma > 1.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::kDomain, "selector factor gamma must be finite and > 1, got " +
                                        FormatDouble(gamma));
  }
}

ScoredEntry ScoreAt(const ClassCursor& cursor, int id, double gamma) {
  const auto& e = cursor.model_class().entry(id);
  ScoredEntry s;
  s.id = id;
  s.penalty = gamma * e.code_length;
  const double log_q = cursor.EntryLogProb(id);
  s.codelength = log_q == -kInf ? kInf : -log_q;
  s.score = s.penalty + s.codelength;
  return s;
}

bool TieBreakBefore(const ModelClass& mc, const ScoredEntry& a, const ScoredEntry& b) {
  const int la = mc.entry(a.id).code_length;
  const int lb = mc.entry(b.id).code_length;
  if (la != lb) return la < lb;
  return a.id < b.id;
}

// True when a is a strictly better explanation than b.
bool Better(const ClassCursor& cursor, double gamma, const ScoredEntry& a,
            const ScoredEntry& b) {
  const auto& mc = cursor.model_class();
  if (a.score == kInf && b.score == kInf) return TieBreakBefore(mc, a, b);
  if (a.score == kInf) return false;
  if (b.score == kInf) return true;
  const double diff = a.score - b.score;
  if (std::abs(diff) >= kExactRecheckBits) return diff < 0.0;
  // score_a - score_b = m + log2(Q_b / Q_a) with m = gamma (L_a - L_b), so
  // its sign is the sign of Q_b 2^m - Q_a whenever m is an integer.
  const double m = gamma * (mc.entry(a.id).code_length - mc.entry(b.id).code_length);
  const double m_round = std::round(m);
  if (std::abs(m - m_round) < 1e-12 && std::abs(m_round) < 1e6) {
    Rational lhs = cursor.cursor(b.id).ExactProb();
    const long shift = static_cast<long>(m_round);
    if (shift >= 0) {
      mpq_mul_2exp(lhs.get_mpq_t(), lhs.get_mpq_t(), static_cast<mp_bitcnt_t>(shift));
    } else {
      mpq_div_2exp(lhs.get_mpq_t(), lhs.get_mpq_t(), static_cast<mp_bitcnt_t>(-shift));
    }
    const int c = cmp(lhs, cursor.cursor(a.id).ExactProb());
    if (c != 0) return c < 0;
    return TieBreakBefore(mc, a, b);
  }
  if (diff != 0.0) return diff < 0.0;
  return TieBreakBefore(mc, a, b);
}

ClassCursor WalkClass(const ModelClass& model_class, const BitString& x) {
  ClassCursor cursor(model_class);
  for (std::size_t i = 0; i < x.size(); ++i) cursor.Push(x[i]);
  return cursor;
}

}  // namespace

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

ScoredEntry MdlScore(const ModelClass& model_class, int id, const BitString& x, double gamma) {
  CheckGamma(gamma);
  model_class.entry(id);
  return ScoreAt(WalkClass(model_class, x), id, gamma);
}

ScoredEntry BestExplanation(const ClassCursor& cursor, const SelectionOptions& options) {
  CheckGamma(options.gamma);
  const auto& mc = cursor.model_class();
  std::optional<ScoredEntry> best;
  for (const auto& e : mc.entries()) {
    if (!options.admit_semimeasures && !e.spec.IsMeasure()) continue;
    ScoredEntry s = ScoreAt(cursor, e.id, options.gamma);
    if (s.score == kInf) continue;
    if (!best || Better(cursor, options.gamma, s, *best)) best = s;
  }
  if (!best) {
    throw Error(ErrorKind::kNoExplanation,
                "no candidate gives positive probability at length " +
                    std::to_string(cursor.depth()));
  }
  return *best;
}

ScoredEntry BestExplanation(const ModelClass& model_class, const BitString& x,
                            const SelectionOptions& options) {
  return BestExplanation(WalkClass(model_class, x), options);
}

double MdlPredict(const ModelClass& model_class, const BitString& x, int bit,
                  const SelectionOptions& options) {
  ClassCursor cursor = WalkClass(model_class, x);
  const ScoredEntry best = BestExplanation(cursor, options);
  return cursor.cursor(best.id).CondProb(bit);
}

double MixturePredict(const ModelClass& model_class, const BitString& x, int bit) {
  return WalkClass(model_class, x).MixtureCondProb(bit);
}

// ---------------------------------------------------------------------------
// SequencePredictor

namespace {

MixtureWeights WeightsFor(const Predictor& predictor) {
  if (const auto* m = std::get_if<MixturePredictor>(&predictor)) return m->weights;
  return MixtureWeights{};
}

}  // namespace

SequencePredictor::SequencePredictor(const ModelClass& model_class, Predictor predictor)
    : predictor_(std::move(predictor)), cursor_(model_class, WeightsFor(predictor_)) {
  if (const auto* mdl = std::get_if<MdlPredictor>(&predictor_)) CheckGamma(mdl->options.gamma);
  if (const auto* single = std::get_if<SinglePredictor>(&predictor_)) {
    model_class.entry(single->id);
  }
}

double SequencePredictor::PredictZero() {
  if (const auto* mdl = std::get_if<MdlPredictor>(&predictor_)) {
    selection_ = BestExplanation(cursor_, mdl->options);
    return cursor_.cursor(selection_.id).CondProb(0);
  }
  if (std::holds_alternative<MixturePredictor>(predictor_)) {
    return cursor_.MixtureCondProb(0);
  }
  return cursor_.cursor(std::get<SinglePredictor>(predictor_).id).CondProb(0);
}

PredictionTrace Trace(const Predictor& predictor, int truth, const ModelClass& model_class,
                      const BitString& omega) {
  if (!model_class.entry(truth).spec.IsMeasure()) {
    throw Error(ErrorKind::kNotAMeasure, "the truth of a trace must be a measure");
  }
  SequencePredictor seq(model_class, predictor);
  PredictionTrace trace;
  trace.has_selection = seq.is_mdl();
  trace.steps.reserve(omega.size());
  double cumulative = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    TraceStep step;
    step.step = i;
    try {
      step.truth_cond0 = seq.cursor().cursor(truth).CondProb(0);
      step.pred_cond0 = seq.PredictZero();
    } catch (const Error& e) {
      throw Error(e.kind(), "trace step " + std::to_string(i) + ": " + e.message());
    }
    const double d = step.truth_cond0 - step.pred_cond0;
    step.sq_err = d * d;
    if (trace.has_selection) {
      step.selected_id = seq.last_selection().id;
      step.selected_score = seq.last_selection().score;
    }
    cumulative += step.sq_err;
    step.cumulative = cumulative;
    trace.steps.push_back(step);
    if (i + 1 == omega.size()) break;
    try {
      seq.Push(omega[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), "trace step " + std::to_string(i) + ": " + e.message());
    }
  }
  return trace;
}

void WriteTraceCsv(const PredictionTrace& trace, std::ostream& out) {
  out << "step,truth_cond0,pred_cond0,sq_err,selected_id,selected_score\n";
  for (const auto& s : trace.steps) {
    out << s.step << ',' << FormatDouble(s.truth_cond0) << ',' << FormatDouble(s.pred_cond0)
        << ',' << FormatDouble(s.sq_err) << ',';
    if (trace.has_selection) out << s.selected_id << ',' << FormatDouble(s.selected_score);
    else out << ',';
    out << '\n';
  }
}

}  // namespace bestexp
