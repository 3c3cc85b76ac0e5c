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

#include "bestexp/harness.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "bestexp/serialization.h"
#include "test_util.h"

namespace bestexp {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

Rational Q(long a, long b) { return Rational(a, b); }

std::string DataFile(const std::string& name) { return std::string(BESTEXP_DATA_DIR) + "/" + name; }

fs::path TempDir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("bestexp_test_" + tag);
  fs::remove_all(dir);
  return dir;
}

std::map<std::string, std::string> ReadAll(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[e.path().filename().string()] = ss.str();
  }
  return out;
}

TEST(SeedsTest, RangesAndLists) {
  EXPECT_EQ(ParseSeeds("3..6"), (std::vector<std::uint64_t>{3, 4, 5, 6}));
  EXPECT_EQ(ParseSeeds("7"), (std::vector<std::uint64_t>{7}));
  EXPECT_EQ(ParseSeeds("1,5,2"), (std::vector<std::uint64_t>{1, 5, 2}));
  EXPECT_EQ(KindOf([] { ParseSeeds("6..3"); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { ParseSeeds("a..3"); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { ParseSeeds(""); }), ErrorKind::kConfig);
}

TEST(ConfigTest, RoundTripAndErrors) {
  ScenarioConfig c;
  c.kind = ScenarioKind::kBounds;
  c.n = 77;
  c.seeds = {4, 9};
  c.weight = 0.5;
  const ScenarioConfig back = ConfigFromJson(ConfigToJson(c));
  EXPECT_EQ(back.kind, ScenarioKind::kBounds);
  EXPECT_EQ(back.n, 77u);
  EXPECT_EQ(back.seeds, c.seeds);
  EXPECT_EQ(back.weight, 0.5);

  const std::string unknown = MessageOf([] { ConfigFromJson(json{{"bogus", 1}}); });
  EXPECT_NE(unknown.find("config.bogus"), std::string::npos);
  const std::string type = MessageOf([] { ConfigFromJson(json{{"n", "ten"}}); });
  EXPECT_NE(type.find("config.n"), std::string::npos);
  EXPECT_EQ(KindOf([] { ConfigFromJson(json{{"n", 0}}); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { ConfigFromJson(json{{"weight", 1.0}}); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { ConfigFromJson(json{{"depth", 21}}); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { ConfigFromJson(json{{"seeds", json::array()}}); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { ConfigFromJson(json{{"gamma", 1.0}}); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { ConfigFromJson(json{{"scenario", "hm-demo"}, {"n", 400}}); }),
            ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { ParseScenario("simulation"); }), ErrorKind::kConfig);
}

TEST(LoadClassTest, ReferenceFiles) {
  const ModelClass two = LoadClass(DataFile("two_entry.json"));
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two.KraftSum(), Q(3, 4));
  EXPECT_TRUE(two.entry(1).spec.SameAs(MeasureSpec::Bernoulli(Q(3, 4))));
  const ModelClass eight = LoadClass(DataFile("bernoulli8.json"));
  const ModelClass builtin = ReferenceBernoulli8Class();
  ASSERT_EQ(eight.size(), builtin.size());
  for (std::size_t i = 0; i < eight.size(); ++i) {
    const int id = static_cast<int>(i);
    EXPECT_TRUE(eight.entry(id).spec.SameAs(builtin.entry(id).spec));
    EXPECT_EQ(eight.entry(id).code_length, builtin.entry(id).code_length);
  }
  EXPECT_EQ(eight.KraftSum(), Q(23, 32));
}

TEST(LoadClassTest, Errors) {
  const std::string kraft = MessageOf([] { LoadClass(DataFile("kraft_violation.json")); });
  EXPECT_NE(kraft.find("5/4"), std::string::npos) << kraft;
  EXPECT_EQ(KindOf([] { LoadClass("/nonexistent/class.json"); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { ClassFromText(R"({"entries": []})"); }), ErrorKind::kDomain);
  const std::string parse = MessageOf([] { ClassFromText("{\n  \"entries\": [\n    {,\n"); });
  EXPECT_NE(parse.find("line 3"), std::string::npos) << parse;
  const std::string field = MessageOf([] {
    ClassFromText(R"([{"family": "bernoulli", "params": {"theta": "0.5"}, "code_length": 1}])");
  });
  EXPECT_NE(field.find("entries[0].params.theta"), std::string::npos) << field;
}

TEST(SerializationTest, SpecRoundTrip) {
  const MeasureSpec specs[] = {
      MeasureSpec::Bernoulli(Q(1, 3)).WithName("third"),
      MeasureSpec::Markov1(Q(1, 4), Q(2, 3), Q(1, 2)),
      MeasureSpec::Interval(Q(5, 8), 12),
      MeasureSpec::Average(MeasureSpec::Bernoulli(Q(1, 2)),
                           MeasureSpec::Markov1(Q(1, 4), Q(2, 3), Q(1, 2)))};
  for (const auto& s : specs) {
    const MeasureSpec back = SpecFromJson(SpecToJson(s), "spec");
    EXPECT_TRUE(back.SameAs(s)) << s.Describe();
    EXPECT_EQ(back.name(), s.name());
  }
  const ModelClass mc = ReferenceTwoEntryClass();
  const ModelClass back = ClassFromJson(ClassToJson(mc));
  EXPECT_EQ(back.KraftSum(), mc.KraftSum());
  const ModelClass ext =
      ClassFromJson(json{{"entries", ClassToJson(mc)}, {"pairwise_averages", true}});
  EXPECT_EQ(ext.size(), 3u);
}

TEST(CampaignTest, SmallRunsAreClean) {
  EXPECT_EQ(RunConvexGapCampaign(1, 20000).violations, 0u);
  EXPECT_EQ(RunConvexnCampaign(1, 2000).violations, 0u);
  EXPECT_EQ(RunPinskerCampaign(1, 20000).violations, 0u);
  EXPECT_EQ(RunConvexGapCampaign(1, 20000).min_slack, RunConvexGapCampaign(1, 20000).min_slack);
}

TEST(AlphaTest, DyadicAndExpansion) {
  const Rational a = RandomDyadicAlpha(3, 100);
  EXPECT_EQ(a.get_den(), mpz_class(1) << 100);
  EXPECT_GT(a, 0);
  EXPECT_LT(a, 1);
  EXPECT_EQ(BinaryExpansion(Q(5, 8), 5).ToString(), "10100");
  EXPECT_EQ(BinaryExpansion(Q(1, 3), 6).ToString(), "010101");
  EXPECT_EQ(RandomDyadicAlpha(3, 100), RandomDyadicAlpha(3, 100));
  EXPECT_NE(RandomDyadicAlpha(3, 100), RandomDyadicAlpha(4, 100));
}

TEST(ScenarioTest, SimulateSingletonHasZeroError) {
  const fs::path dir = TempDir("single");
  ScenarioConfig c;
  c.kind = ScenarioKind::kSimulate;
  c.class_path = DataFile("two_entry.json");
  const fs::path cls = dir.parent_path() / "bestexp_test_single_class.json";
  {
    std::ofstream out(cls);
    out << R"([{"family": "bernoulli", "params": {"theta": "2/3"}, "code_length": 0}])";
  }
  c.class_path = cls.string();
  c.n = 300;
  c.seeds = ParseSeeds("0..4");
  c.out_dir = dir.string();
  const RunSummary s = RunScenario(c);
  EXPECT_EQ(s.summary["aggregate"]["mdl_max_cumulative"].get<double>(), 0.0);
  EXPECT_EQ(s.summary["aggregate"]["mixture_max_cumulative"].get<double>(), 0.0);
  fs::remove(cls);
}

TEST(ScenarioTest, ExpectDepthTwoIsZero) {
  ScenarioConfig c;
  c.kind = ScenarioKind::kExpect;
  c.depth = 2;
  c.out_dir = TempDir("expect").string();
  const RunSummary s = RunScenario(c);
  EXPECT_EQ(s.summary["aggregate"]["mdl_total"].get<double>(), 0.0);
}

TEST(ScenarioTest, HmDemoWithoutContamination) {
  ScenarioConfig c;
  c.kind = ScenarioKind::kHmDemo;
  c.n = 100;
  c.alpha_bits = 400;
  c.weight = 0.0;
  c.out_dir = TempDir("hm0").string();
  const RunSummary s = RunScenario(c);
  EXPECT_TRUE(s.all_pass);
  EXPECT_EQ(s.summary["per_seed"][0]["mixture_cumulative"].get<double>(), 0.0);
  EXPECT_TRUE(s.summary["per_seed"][0]["certainty_ok"].get<bool>());
  EXPECT_EQ(s.summary["per_seed"][0]["mdl_semimeasure_selections"].get<int>(), 0);
}

TEST(ScenarioTest, OutputsAreByteIdentical) {
  for (auto kind : {ScenarioKind::kSimulate, ScenarioKind::kBounds, ScenarioKind::kDeficiency,
                    ScenarioKind::kHmDemo, ScenarioKind::kLemmas, ScenarioKind::kExpect}) {
    ScenarioConfig c;
    c.kind = kind;
    c.class_path = "builtin:bernoulli8";
    c.truth = 4;
    c.n = kind == ScenarioKind::kLemmas ? 5000 : 200;
    c.depth = 6;
    c.seeds = ParseSeeds("0..3");
    c.alpha_bits = 800;
    c.stages = 3;
    const std::string tag = ScenarioName(kind);
    c.out_dir = TempDir(tag + "_a").string();
    RunScenario(c);
    const auto first = ReadAll(c.out_dir);
    c.out_dir = TempDir(tag + "_b").string();
    RunScenario(c);
    auto second = ReadAll(c.out_dir);
    ASSERT_EQ(first.size(), second.size()) << tag;
    for (const auto& [name, content] : first) {
      if (name == "summary.json") {
        // The out path is echoed; compare everything else.
        json a = json::parse(content), b = json::parse(second[name]);
        a["scenario"].erase("out");
        b["scenario"].erase("out");
        EXPECT_EQ(a.dump(), b.dump()) << tag;
      } else {
        EXPECT_EQ(content, second[name]) << tag << " " << name;
      }
    }
  }
}

}  // namespace
}  // namespace bestexp
