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

#ifndef BESTEXP_BOUND_REPORT_H_
#define BESTEXP_BOUND_REPORT_H_

#include <optional>
#include <string>

namespace bestexp {

// Measured constants of an inequality chain against its explicit bound.
// Large constants are carried in log2 form; the plain values may overflow
// to infinity.
struct BoundReport {
  std::optional<double> log2_C;  // domination constant C
  std::optional<double> log2_c;  // mean/geometric product ratio c
  std::optional<double> K_pair;
  std::optional<double> D;
  std::optional<int> L_P;
  std::optional<int> L_Q;
  double sum = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool pass = false;
  std::string failed_link;  // empty on pass

  static constexpr double kTolerance = 1e-9;

  // Sets slack and pass from sum and bound; keeps pass false if a link
  // already failed.
  void Finish() {
    slack = bound - sum;
    pass = failed_link.empty() && slack >= -kTolerance;
    if (!pass && failed_link.empty()) failed_link = "sum";
  }
};

}  // namespace bestexp

#endif  // BESTEXP_BOUND_REPORT_H_
