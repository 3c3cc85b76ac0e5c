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

#ifndef BESTEXP_MODEL_CLASS_H_
#define BESTEXP_MODEL_CLASS_H_

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bestexp/measures.h"

namespace bestexp {

struct ClassEntry {
  MeasureSpec spec;
  int code_length = 0;  // bits; stands in for the prefix complexity of spec
  int id = 0;           // position in the class
};

// A finite list of specs with prefix-code lengths satisfying Kraft. The
// Kraft-weighted mixture of the entries stands in for the universal
// semimeasure.
class ModelClass {
 public:
  // Throws kDomain on an empty list or negative length, kKraft if the
  // lengths violate sum 2^-L <= 1.
  explicit ModelClass(std::vector<std::pair<MeasureSpec, int>> entries);

  // Adds average(P, Q) for every unordered pair of distinct measure
  // entries at code length L(P) + L(Q) + 2. Throws kKraft if the result no
  // longer fits.
  static ModelClass WithPairwiseAverages(const ModelClass& base);

  std::size_t size() const { return entries_.size(); }
  const ClassEntry& entry(int id) const;
  const std::vector<ClassEntry>& entries() const { return entries_; }

  Rational KraftSum() const;
  Rational Weight(int id) const;  // 2^-L exactly
  double LogWeight(int id) const { return -static_cast<double>(entry(id).code_length); }

  // Id of an entry structurally equal to average(P, Q) or average(Q, P).
  std::optional<int> FindAverage(int p_id, int q_id) const;

  // Prefix-code length of the pair (P, Q): L(P) + L(Q) + 2.
  int PairCodeLength(int p_id, int q_id) const;

 private:
  std::vector<ClassEntry> entries_;
  std::map<std::pair<int, int>, int> averages_;
};

// Mixture weights over a class; empty means the Kraft weights 2^-L.
struct MixtureWeights {
  std::vector<Rational> weights;

  static MixtureWeights Explicit(std::vector<Rational> weights);
  bool is_kraft() const { return weights.empty(); }
};

// Walks every entry of a class down the tree together.
class ClassCursor {
 public:
  explicit ClassCursor(const ModelClass& model_class,
                       MixtureWeights weights = MixtureWeights{});

  const ModelClass& model_class() const { return *class_; }
  std::size_t depth() const { return depth_; }

  void Push(int bit);
  bool CanPush() const;

  const MeasureCursor& cursor(int id) const { return cursors_[static_cast<std::size_t>(id)]; }
  double EntryLogProb(int id) const { return cursor(id).LogProb(); }

  double MixtureLogProb() const;
  Rational MixtureExact() const;
  ProbValue MixtureProb() const;

  // xi(xb) / xi(x); throws kZeroContext when xi(x) = 0.
  double MixtureCondProb(int bit) const;

  // ceil(-log2 xi(x)), decided exactly at integer boundaries. Throws
  // kZeroProbability when xi(x) = 0.
  int AprioriComplexity() const;

 private:

  const ModelClass* class_;
  std::vector<Rational> weights_;
  std::vector<double> log_weights_;
  std::vector<MeasureCursor> cursors_;
  std::size_t depth_ = 0;
};

// xi(x) = sum_Q 2^-L(Q) Q(x).
ProbValue MixtureProb(const ModelClass& model_class, const BitString& x);
double MixtureLogProb(const ModelClass& model_class, const BitString& x);

// ceil(-log2 xi(x)), the surrogate a priori complexity KA(x).
int AprioriComplexity(const ModelClass& model_class, const BitString& x);

// -log2 P(x) - KA(x) for the entry P. Throws kZeroProbability if P(x) = 0.
double Deficiency(const ModelClass& model_class, int p_id, const BitString& x);

struct DeficiencyReport {
  std::vector<double> per_prefix;  // index i is the prefix of length i
  std::vector<double> running_sup;
  double sup = 0.0;                // D
  std::size_t argmax_length = 0;
};

// Deficiencies of every prefix of omega, lengths 0 .. |omega|.
DeficiencyReport DeficiencyProfile(const ModelClass& model_class, int p_id,
                                   const BitString& omega);

// log2 of sum_i 2^(terms_i); -infinity if every term is -infinity.
double LogSumExp2(std::span<const double> terms);

}  // namespace bestexp

#endif  // BESTEXP_MODEL_CLASS_H_
