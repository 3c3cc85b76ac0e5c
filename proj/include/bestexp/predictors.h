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

#ifndef BESTEXP_PREDICTORS_H_
#define BESTEXP_PREDICTORS_H_

#include <iosfwd>
#include <variant>
#include <vector>

#include "bestexp/model_class.h"

namespace bestexp {

// gamma * L(Q) - log2 Q(x), split into its two parts.
struct ScoredEntry {
  int id = -1;
  double score = 0.0;
  double penalty = 0.0;     // gamma * L(Q)
  double codelength = 0.0;  // -log2 Q(x); +infinity when Q(x) = 0
};

struct SelectionOptions {
  double gamma = 3.0;  // must exceed 1
  // Interval (semimeasure) entries are not candidates unless admitted.
  bool admit_semimeasures = false;
};

ScoredEntry MdlScore(const ModelClass& model_class, int id, const BitString& x,
                     double gamma = 3.0);

// Minimal score; ties go to the smaller code length, then the smaller id.
// Scores within 1e-6 bits of each other are compared in exact arithmetic.
ScoredEntry BestExplanation(const ModelClass& model_class, const BitString& x,
                            const SelectionOptions& options = {});
ScoredEntry BestExplanation(const ClassCursor& cursor, const SelectionOptions& options = {});

// H(b | x) = Q(xb) / Q(x) for the best explanation Q of x.
double MdlPredict(const ModelClass& model_class, const BitString& x, int bit,
                  const SelectionOptions& options = {});

// xi(xb) / xi(x).
double MixturePredict(const ModelClass& model_class, const BitString& x, int bit);

struct MdlPredictor {
  SelectionOptions options;
};
struct MixturePredictor {
  MixtureWeights weights;  // default: Kraft weights of the class
};
struct SinglePredictor {
  int id = 0;
};
using Predictor = std::variant<MdlPredictor, MixturePredictor, SinglePredictor>;

// Stateful wrapper that walks a class cursor and predicts the next bit.
class SequencePredictor {
 public:
  SequencePredictor(const ModelClass& model_class, Predictor predictor);

  // Prediction for the next bit being 0 at the current node. For MDL the
  // selection is left in last_selection().
  double PredictZero();
  void Push(int bit) { cursor_.Push(bit); }

  const ClassCursor& cursor() const { return cursor_; }
  const ScoredEntry& last_selection() const { return selection_; }
  bool is_mdl() const { return std::holds_alternative<MdlPredictor>(predictor_); }

 private:
  Predictor predictor_;
  ClassCursor cursor_;
  ScoredEntry selection_;
};

struct TraceStep {
  std::size_t step = 0;  // equals the context length
  double truth_cond0 = 0.0;
  double pred_cond0 = 0.0;
  double sq_err = 0.0;
  int selected_id = -1;  // MDL only
  double selected_score = 0.0;
  double cumulative = 0.0;
};

struct PredictionTrace {
  std::vector<TraceStep> steps;
  bool has_selection = false;

  double cumulative() const { return steps.empty() ? 0.0 : steps.back().cumulative; }
};

// One step per proper prefix of omega (context lengths 0 .. |omega|-1).
// Evaluation failures are rethrown with the failing step index.
PredictionTrace Trace(const Predictor& predictor, int truth, const ModelClass& model_class,
                      const BitString& omega);

// Columns: step,truth_cond0,pred_cond0,sq_err,selected_id,selected_score.
// selected_id/selected_score are empty for predictors without a selection.
void WriteTraceCsv(const PredictionTrace& trace, std::ostream& out);

// Shortest round-trip decimal form; "inf"/"-inf"/"nan" otherwise.
std::string FormatDouble(double value);

}  // namespace bestexp

#endif  // BESTEXP_PREDICTORS_H_
