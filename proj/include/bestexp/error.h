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

#ifndef BESTEXP_ERROR_H_
#define BESTEXP_ERROR_H_

#include <stdexcept>
#include <string>

namespace bestexp {

enum class ErrorKind {
  kDomain,           // argument outside the operation's precondition
  kDepthExceeded,    // evaluation past an interval spec's precision horizon
  kZeroContext,      // conditioning on a string of probability zero
  kZeroProbability,  // deficiency of a string the model rules out
  kNoExplanation,    // every candidate gives the string probability zero
  kKraft,            // code lengths violate the Kraft inequality
  kNotAMeasure,      // a semimeasure was passed where a measure is required
  kParse,            // malformed JSON or spec text
  kConfig,           // invalid scenario configuration
  kBoundViolation,   // an inequality chain link failed
};

const char* ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
        kind_(kind),
        message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  // The message without the kind prefix, for re-wrapping with context.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace bestexp

#endif  // BESTEXP_ERROR_H_
