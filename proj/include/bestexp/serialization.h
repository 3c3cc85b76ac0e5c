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

#ifndef BESTEXP_SERIALIZATION_H_
#define BESTEXP_SERIALIZATION_H_

#include <string>
#include <string_view>

#include "json.hpp"

#include "bestexp/analysis.h"
#include "bestexp/model_class.h"

namespace bestexp {

// {"family": ..., "params": {...}, "name": ...}; rationals as "num/den".
nlohmann::json SpecToJson(const MeasureSpec& spec);

// `path` prefixes error messages, e.g. "entries[2]".
MeasureSpec SpecFromJson(const nlohmann::json& j, const std::string& path);

// A class file is either a list of entries or
// {"entries": [...], "pairwise_averages": bool}. Each entry is a spec
// object plus "code_length". Throws kParse or kDomain with the field path,
// kKraft with the offending sum.
ModelClass ClassFromJson(const nlohmann::json& j);
ModelClass ClassFromText(std::string_view text);
nlohmann::json ClassToJson(const ModelClass& model_class);

nlohmann::json BoundReportToJson(const BoundReport& report);

}  // namespace bestexp

#endif  // BESTEXP_SERIALIZATION_H_
