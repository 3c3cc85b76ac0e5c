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

#include "bestexp/model_class.h"

#include <gmp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bestexp/error.h"

namespace bestexp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Below this distance from an integer the ceiling is settled exactly.
constexpr double kCeilingGuard = 1e-6;

Rational PowerOfTwo(long exponent) {
  Rational out(1);
  if (exponent >= 0) {
    mpq_mul_2exp(out.get_mpq_t(), out.get_mpq_t(), static_cast<mp_bitcnt_t>(exponent));
  } else {
    mpq_div_2exp(out.get_mpq_t(), out.get_mpq_t(), static_cast<mp_bitcnt_t>(-exponent));
  }
  return out;
}

void ValidateKraft(const std::vector<ClassEntry>& entries) {
  Rational sum(0);
  for (const auto& e : entries) sum += PowerOfTwo(-e.code_length);
  if (sum > 1) {
    throw Error(ErrorKind::kKraft, "sum of 2^-L is " + FormatRational(sum) + " (" +
                                       std::to_string(sum.get_d()) + ") > 1");
  }
}

}  // namespace

double LogSumExp2(std::span<const double> terms) {
  double top = kNegInf;
  for (double t : terms) top = std::max(top, t);
  if (top == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double t : terms) {
    if (t != kNegInf) acc += std::exp2(t - top);
  }
  return top + std::log2(acc);
}

// ---------------------------------------------------------------------------
// ModelClass

ModelClass::ModelClass(std::vector<std::pair<MeasureSpec, int>> entries) {
  if (entries.empty()) throw Error(ErrorKind::kDomain, "model class needs at least one entry");
  entries_.reserve(entries.size());
  for (auto& [spec, length] : entries) {
    if (length < 0) {
      throw Error(ErrorKind::kDomain, "code length must be >= 0 (entry " +
                                          std::to_string(entries_.size()) + ")");
    }
    entries_.push_back(ClassEntry{std::move(spec), length, static_cast<int>(entries_.size())});
  }
  ValidateKraft(entries_);
}

ModelClass ModelClass::WithPairwiseAverages(const ModelClass& base) {
  std::vector<std::pair<MeasureSpec, int>> list;
  for (const auto& e : base.entries_) list.emplace_back(e.spec, e.code_length);
  std::map<std::pair<int, int>, int> averages;
  for (std::size_t i = 0; i < base.size(); ++i) {
    for (std::size_t j = i + 1; j < base.size(); ++j) {
      const auto& p = base.entries_[i];
      const auto& q = base.entries_[j];
      if (!p.spec.IsMeasure() || !q.spec.IsMeasure()) continue;
      averages[{p.id, q.id}] = static_cast<int>(list.size());
      list.emplace_back(AverageMeasure(p.spec, q.spec), base.PairCodeLength(p.id, q.id));
    }
  }
  ModelClass out(std::move(list));
  out.averages_ = std::move(averages);
  return out;
}

const ClassEntry& ModelClass::entry(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= entries_.size()) {
    throw Error(ErrorKind::kDomain, "entry id " + std::to_string(id) + " out of range");
  }
  return entries_[static_cast<std::size_t>(id)];
}

Rational ModelClass::KraftSum() const {
  Rational sum(0);
  for (const auto& e : entries_) sum += PowerOfTwo(-e.code_length);
  return sum;
}

Rational ModelClass::Weight(int id) const { return PowerOfTwo(-entry(id).code_length); }

std::optional<int> ModelClass::FindAverage(int p_id, int q_id) const {
  const auto key = std::minmax(p_id, q_id);
  if (auto it = averages_.find({key.first, key.second}); it != averages_.end()) {
    return it->second;
  }
  const auto& p = entry(p_id).spec;
  const auto& q = entry(q_id).spec;
  for (const auto& e : entries_) {
    if (e.spec.family() != Family::kAverage) continue;
    const auto& a = e.spec.average();
    if ((a.left->SameAs(p) && a.right->SameAs(q)) || (a.left->SameAs(q) && a.right->SameAs(p))) {
      return e.id;
    }
  }
  return std::nullopt;
}

int ModelClass::PairCodeLength(int p_id, int q_id) const {
  return entry(p_id).code_length + entry(q_id).code_length + 2;
}

MixtureWeights MixtureWeights::Explicit(std::vector<Rational> weights) {
  Rational sum(0);
  for (auto& w : weights) {
    w.canonicalize();
    if (sgn(w) < 0) throw Error(ErrorKind::kDomain, "mixture weights must be non-negative");
    sum += w;
  }
  if (sum > 1) throw Error(ErrorKind::kDomain, "mixture weights sum to more than 1");
  return MixtureWeights{std::move(weights)};
}

// ---------------------------------------------------------------------------
// ClassCursor

ClassCursor::ClassCursor(const ModelClass& model_class, MixtureWeights weights)
    : class_(&model_class) {
  const std::size_t n = model_class.size();
  if (weights.is_kraft()) {
    for (std::size_t i = 0; i < n; ++i) {
      weights_.push_back(model_class.Weight(static_cast<int>(i)));
      log_weights_.push_back(model_class.LogWeight(static_cast<int>(i)));
    }
  } else {
    if (weights.weights.size() != n) {
      throw Error(ErrorKind::kDomain, "mixture weight count does not match class size");
    }
    Rational total = 0;
    for (const auto& w : weights.weights) {
      if (sgn(w) < 0) throw Error(ErrorKind::kDomain, "mixture weights must be non-negative");
      total += w;
    }
    if (total > 1) {
      throw Error(ErrorKind::kDomain, "mixture weights sum to " + FormatRational(total) + " > 1");
    }
    weights_ = std::move(weights.weights);
    for (const auto& w : weights_) log_weights_.push_back(Log2Exact(w));
  }
  cursors_.reserve(n);
  for (const auto& e : model_class.entries()) cursors_.emplace_back(e.spec);
}

bool ClassCursor::CanPush() const {
  return std::all_of(cursors_.begin(), cursors_.end(),
                     [](const MeasureCursor& c) { return c.CanPush(); });
}

void ClassCursor::Push(int bit) {
  for (auto& c : cursors_) c.Push(bit);
  ++depth_;
}

double ClassCursor::MixtureLogProb() const {
  std::vector<double> terms(cursors_.size());
  for (std::size_t i = 0; i < cursors_.size(); ++i) {
    terms[i] = log_weights_[i] == kNegInf ? kNegInf : log_weights_[i] + cursors_[i].LogProb();
  }
  return LogSumExp2(terms);
}

Rational ClassCursor::MixtureExact() const {
  Rational sum(0);
  for (std::size_t i = 0; i < cursors_.size(); ++i) {
    if (sgn(weights_[i]) == 0) continue;
    sum += weights_[i] * cursors_[i].ExactProb();
  }
  return sum;
}

ProbValue ClassCursor::MixtureProb() const {
  return ProbValue{MixtureExact(), LogProb{MixtureLogProb()}};
}

// Posterior-weighted average of the entries' conditionals. A single live
// entry returns its own conditional unchanged.
double ClassCursor::MixtureCondProb(int bit) const {
  double top = kNegInf;
  std::vector<double> logs(cursors_.size(), kNegInf);
  for (std::size_t i = 0; i < cursors_.size(); ++i) {
    if (log_weights_[i] == kNegInf || cursors_[i].IsZero()) continue;
    logs[i] = log_weights_[i] + cursors_[i].LogProb();
    top = std::max(top, logs[i]);
  }
  if (top == kNegInf) throw Error(ErrorKind::kZeroContext, "mixture has zero mass here");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < cursors_.size(); ++i) {
    if (logs[i] == kNegInf) continue;
    const double w = std::exp2(logs[i] - top);
    num += w * cursors_[i].CondProb(bit);
    den += w;
  }
  return std::min(1.0, num / den);
}

int ClassCursor::AprioriComplexity() const {
  const double v = -MixtureLogProb();
  if (v == std::numeric_limits<double>::infinity()) {
    throw Error(ErrorKind::kZeroProbability, "mixture mass is zero; a priori complexity is infinite");
  }
  const double nearest = std::round(v);
  if (std::abs(v - nearest) >= kCeilingGuard) return static_cast<int>(std::ceil(v));
  // -log2 xi lies within the guard of `nearest`: KA is nearest iff
  // xi * 2^nearest >= 1.
  const Rational scaled = MixtureExact() * PowerOfTwo(static_cast<long>(nearest));
  return scaled >= 1 ? static_cast<int>(nearest) : static_cast<int>(nearest) + 1;
}

// ---------------------------------------------------------------------------
// Free functions

namespace {

ClassCursor WalkClass(const ModelClass& model_class, const BitString& x) {
  ClassCursor cursor(model_class);
  for (std::size_t i = 0; i < x.size(); ++i) cursor.Push(x[i]);
  return cursor;
}

double DeficiencyAt(const ClassCursor& cursor, int p_id) {
  const double log_p = cursor.EntryLogProb(p_id);
  if (log_p == kNegInf) {
    throw Error(ErrorKind::kZeroProbability,
                "deficiency undefined: P(x) = 0 at length " + std::to_string(cursor.depth()));
  }
  return -log_p - cursor.AprioriComplexity();
}

}  // namespace

ProbValue MixtureProb(const ModelClass& model_class, const BitString& x) {
  return WalkClass(model_class, x).MixtureProb();
}

double MixtureLogProb(const ModelClass& model_class, const BitString& x) {
  return WalkClass(model_class, x).MixtureLogProb();
}

int AprioriComplexity(const ModelClass& model_class, const BitString& x) {
  return WalkClass(model_class, x).AprioriComplexity();
}

double Deficiency(const ModelClass& model_class, int p_id, const BitString& x) {
  model_class.entry(p_id);
  return DeficiencyAt(WalkClass(model_class, x), p_id);
}

DeficiencyReport DeficiencyProfile(const ModelClass& model_class, int p_id,
                                   const BitString& omega) {
  model_class.entry(p_id);
  DeficiencyReport report;
  ClassCursor cursor(model_class);
  for (std::size_t i = 0;; ++i) {
    const double d = DeficiencyAt(cursor, p_id);
    report.per_prefix.push_back(d);
    if (i == 0 || d > report.sup) {
      report.sup = d;
      report.argmax_length = i;
    }
    report.running_sup.push_back(report.sup);
    if (i == omega.size()) break;
    cursor.Push(omega[i]);
  }
  return report;
}

}  // namespace bestexp
