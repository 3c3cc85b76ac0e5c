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

// Command-line front end: one subcommand per scenario.
//
// Exit codes: 0 all checks pass, 1 a bound check failed, 2 bad config or
// input, 3 any other error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "bestexp/error.h"
#include "bestexp/harness.h"

namespace {

struct Flags {
  std::string config_path;
  std::string class_path;
  int truth = 0;
  std::size_t n = 0;
  int depth = 0;
  int max_depth = 0;
  std::string seeds;
  double gamma = 0;
  double weight = 0;
  int alpha_bits = 0;
  int stages = 0;
  std::string out;
  bool admit = false;
};

bestexp::ScenarioConfig Resolve(bestexp::ScenarioKind kind, const Flags& f,
                                const CLI::App& sub) {
  bestexp::ScenarioConfig c;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path, std::ios::binary);
    if (!in) {
      throw bestexp::Error(bestexp::ErrorKind::kConfig,
                           "config: cannot open '" + f.config_path + "'");
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw bestexp::Error(bestexp::ErrorKind::kParse, f.config_path + ": " + e.what());
    }
    j["scenario"] = bestexp::ScenarioName(kind);
    c = bestexp::ConfigFromJson(j);
  }
  c.kind = kind;
  auto given = [&](const char* name) { return sub.count(name) > 0; };
  if (given("--class")) c.class_path = f.class_path;
  if (given("--truth")) c.truth = f.truth;
  if (given("--n")) c.n = f.n;
  if (given("--depth")) c.depth = f.depth;
  if (given("--max-depth")) c.max_depth = f.max_depth;
  if (given("--seeds")) c.seeds = bestexp::ParseSeeds(f.seeds);
  if (given("--gamma")) c.gamma = f.gamma;
  if (given("--weight")) c.weight = f.weight;
  if (given("--alpha-bits")) c.alpha_bits = f.alpha_bits;
  if (given("--stages")) c.stages = f.stages;
  if (given("--out")) c.out_dir = f.out;
  if (given("--admit-semimeasures")) c.admit_semimeasures = f.admit;
  if (kind == bestexp::ScenarioKind::kLemmas && !given("--n") && f.config_path.empty()) {
    c.n = 1'000'000;
  }
  bestexp::ValidateConfig(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bestexp: MDL best-explanation prediction lab"};
  app.set_version_flag("--version", bestexp::kToolVersion);
  app.require_subcommand(1);
  Flags f;
  const std::pair<bestexp::ScenarioKind, const char*> kinds[] = {
      {bestexp::ScenarioKind::kLemmas, "randomized campaigns for the convexity and Pinsker inequalities"},
      {bestexp::ScenarioKind::kSimulate, "sample sequences from the truth and trace both predictors"},
      {bestexp::ScenarioKind::kExpect, "exact expected squared error by tree enumeration"},
      {bestexp::ScenarioKind::kHmDemo, "interval-semimeasure counterexample for the mixture"},
      {bestexp::ScenarioKind::kDeficiency, "randomness deficiency profiles and shell counts"},
      {bestexp::ScenarioKind::kBounds, "explicit-constant bound checks"}};
  std::vector<std::pair<bestexp::ScenarioKind, CLI::App*>> subs;
  for (const auto& [kind, help] : kinds) {
    CLI::App* sub = app.add_subcommand(bestexp::ScenarioName(kind), help);
    sub->add_option("--config", f.config_path, "JSON config file; flags override its fields");
    sub->add_option("--class", f.class_path, "class file, or builtin:two / builtin:bernoulli8");
    sub->add_option("--truth", f.truth, "truth entry id");
    sub->add_option("--n", f.n, "sequence length (lemmas: samples)");
    sub->add_option("--depth", f.depth, "enumeration depth");
    sub->add_option("--max-depth", f.max_depth, "enumeration depth cap");
    sub->add_option("--seeds", f.seeds, "seed range a..b or list a,b,c");
    sub->add_option("--gamma", f.gamma, "MDL penalty factor (> 1)");
    sub->add_option("--weight", f.weight, "hm-demo weight on the interval semimeasure");
    sub->add_option("--alpha-bits", f.alpha_bits, "hm-demo precision of alpha");
    sub->add_option("--stages", f.stages, "hm-demo staged approximation count");
    sub->add_option("--out", f.out, "output directory");
    sub->add_flag("--admit-semimeasures", f.admit, "let MDL select semimeasure entries");
    subs.emplace_back(kind, sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (const auto& [kind, sub] : subs) {
    if (!sub->parsed()) continue;
    try {
      const bestexp::ScenarioConfig config = Resolve(kind, f, *sub);
      const bestexp::RunSummary summary = bestexp::RunScenario(config);
      std::cout << bestexp::ScenarioName(kind) << ": " << (summary.all_pass ? "PASS" : "FAIL")
                << " (" << config.out_dir << "/summary.json)\n";
      std::cerr << "wall time " << summary.wall_seconds << " s\n";
      return summary.all_pass ? 0 : 1;
    } catch (const bestexp::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      switch (e.kind()) {
        case bestexp::ErrorKind::kConfig:
        case bestexp::ErrorKind::kParse:
        case bestexp::ErrorKind::kKraft:
        case bestexp::ErrorKind::kDomain:
        case bestexp::ErrorKind::kDepthExceeded:
        case bestexp::ErrorKind::kNotAMeasure:
          return 2;
        default:
          return 3;
      }
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 3;
    }
  }
  return 2;
}
