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

#ifndef BESTEXP_HARNESS_H_
#define BESTEXP_HARNESS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "bestexp/analysis.h"
#include "bestexp/model_class.h"

namespace bestexp {

inline constexpr const char* kToolVersion = "0.1.0";

enum class ScenarioKind { kLemmas, kSimulate, kExpect, kHmDemo, kDeficiency, kBounds };

const char* ScenarioName(ScenarioKind kind);
ScenarioKind ParseScenario(const std::string& name);  // throws kConfig

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::kSimulate;
  // A JSON class file, or "builtin:two" / "builtin:bernoulli8".
  std::string class_path = "builtin:two";
  int truth = 0;
  std::size_t n = 1000;
  int depth = 10;
  int max_depth = kDefaultMaxDepth;
  std::vector<std::uint64_t> seeds{0};
  double gamma = 3.0;
  std::string out_dir = "out";
  bool admit_semimeasures = false;
  // hm-demo
  int alpha_bits = 1200;
  double weight = 0.99;
  int stages = 0;  // > 0 adds the staged lower-approximation sweep
};

// Throws kConfig naming the offending field.
void ValidateConfig(const ScenarioConfig& config);

// Reads the keys of ScenarioConfig from a JSON object (see README).
ScenarioConfig ConfigFromJson(const nlohmann::json& j);
nlohmann::json ConfigToJson(const ScenarioConfig& config);

// "a..b" (inclusive) or a comma-separated list.
std::vector<std::uint64_t> ParseSeeds(const std::string& text);

struct RunSummary {
  nlohmann::json summary;  // written to <out>/summary.json
  bool all_pass = true;
  double wall_seconds = 0.0;  // not part of summary.json
};

// Loads a class file (or builtin) and validates it.
ModelClass LoadClass(const std::string& path);

// {(bernoulli(1/2), 1), (bernoulli(3/4), 2)}.
ModelClass ReferenceTwoEntryClass();
// Eight Bernoulli entries with code lengths 2..5; see data/bernoulli8.json.
ModelClass ReferenceBernoulli8Class();

RunSummary RunScenario(const ScenarioConfig& config);
RunSummary HmDemo(const ScenarioConfig& config);

// Lemma campaigns: count of sampled inputs and violations.
struct CampaignResult {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double min_slack = 0.0;
};

// (p, q) in (0,1]^2: ConvexGap >= (p-q)^2/(8 ln2) - 1e-12.
CampaignResult RunConvexGapCampaign(std::uint64_t seed, std::size_t count);
// Vector pairs of length 1..64: sum (p-q)^2 <= 4 ln2 log2 c + 1e-9.
CampaignResult RunConvexnCampaign(std::uint64_t seed, std::size_t count);
// KlBernoulli(p, q) >= (2/ln2)(p-q)^2 - 1e-12.
CampaignResult RunPinskerCampaign(std::uint64_t seed, std::size_t count);

// Dyadic alpha with exactly `bits` fractional bits drawn from the seed,
// standing in for a lower-semicomputable random real.
Rational RandomDyadicAlpha(std::uint64_t seed, int bits);
// First n bits of the binary expansion of alpha.
BitString BinaryExpansion(const Rational& alpha, std::size_t n);

}  // namespace bestexp

#endif  // BESTEXP_HARNESS_H_
