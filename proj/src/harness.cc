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

#include <gmp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "bestexp/error.h"
#include "bestexp/rng.h"
#include "bestexp/serialization.h"

namespace bestexp {

using nlohmann::json;

namespace {

[[noreturn]] void ConfigFail(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::kConfig, field + ": " + what);
}

// Runs f(i) for i in [0, count) on up to hardware_concurrency threads.
// Each index is owned by one worker; the first exception is rethrown.
template <typename F>
void ParallelFor(std::size_t count, F&& f) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::filesystem::path PrepareOutDir(const ScenarioConfig& config) {
  std::filesystem::path dir(config.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) ConfigFail("out", "cannot create directory '" + config.out_dir + "': " + ec.message());
  return dir;
}

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kConfig, "cannot write '" + path.string() + "'");
  out << content;
}

std::string SeedTag(std::uint64_t seed) { return "seed" + std::to_string(seed); }

const MeasureSpec& TruthSpec(const ModelClass& mc, int truth) {
  if (truth < 0 || static_cast<std::size_t>(truth) >= mc.size()) {
    ConfigFail("truth", "entry id " + std::to_string(truth) + " not in class of size " +
                            std::to_string(mc.size()));
  }
  const auto& spec = mc.entry(truth).spec;
  if (!spec.IsMeasure()) ConfigFail("truth", "truth must be a measure");
  return spec;
}

double SampleUnit(CounterRng& rng) {
  const std::uint64_t mode = rng.NextU64() & 3;
  const double u = rng.NextUnitOpenClosed();
  if (mode == 0) return std::exp2(-50.0 * u);  // log-uniform down to 2^-50
  return u;
}

double SampleOpenUnit(CounterRng& rng) {
  return (static_cast<double>(rng.NextU64() >> 11) + 0.5) * 0x1.0p-53;
}

void Track(CampaignResult& r, double slack, double tolerance) {
  if (r.samples == 0 || slack < r.min_slack) r.min_slack = slack;
  ++r.samples;
  // A non-finite slack means the evaluation itself broke down.
  if (slack < -tolerance || !std::isfinite(slack)) ++r.violations;
}

json CampaignJson(const CampaignResult& r) {
  return json{{"samples", r.samples}, {"violations", r.violations}, {"min_slack", r.min_slack}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

const char* ScenarioName(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kLemmas: return "lemmas";
    case ScenarioKind::kSimulate: return "simulate";
    case ScenarioKind::kExpect: return "expect";
    case ScenarioKind::kHmDemo: return "hm-demo";
    case ScenarioKind::kDeficiency: return "deficiency";
    case ScenarioKind::kBounds: return "bounds";
  }
  return "unknown";
}

ScenarioKind ParseScenario(const std::string& name) {
  for (auto k : {ScenarioKind::kLemmas, ScenarioKind::kSimulate, ScenarioKind::kExpect,
                 ScenarioKind::kHmDemo, ScenarioKind::kDeficiency, ScenarioKind::kBounds}) {
    if (name == ScenarioName(k)) return k;
  }
  ConfigFail("scenario", "unknown scenario '" + name + "'");
}

std::vector<std::uint64_t> ParseSeeds(const std::string& text) {
  auto parse_one = [&](const std::string& s) -> std::uint64_t {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      ConfigFail("seeds", "bad seed '" + s + "' in '" + text + "'");
    }
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      ConfigFail("seeds", "seed out of range in '" + text + "'");
    }
  };
  std::vector<std::uint64_t> seeds;
  if (auto pos = text.find(".."); pos != std::string::npos) {
    const std::uint64_t a = parse_one(text.substr(0, pos));
    const std::uint64_t b = parse_one(text.substr(pos + 2));
    if (b < a) ConfigFail("seeds", "empty range '" + text + "'");
    if (b - a >= 10'000'000) ConfigFail("seeds", "range too large");
    for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) seeds.push_back(parse_one(item));
  if (seeds.empty()) ConfigFail("seeds", "no seeds given");
  return seeds;
}

void ValidateConfig(const ScenarioConfig& c) {
  if (c.n < 1) ConfigFail("n", "must be >= 1");
  if (c.max_depth < 0 || c.max_depth > 24) ConfigFail("max_depth", "must lie in [0, 24]");
  if (c.depth < 0 || c.depth > c.max_depth) {
    ConfigFail("depth", "must lie in [0, " + std::to_string(c.max_depth) + "]");
  }
  if (c.seeds.empty()) ConfigFail("seeds", "must be non-empty");
  if (!(c.gamma > 1.0) || !std::isfinite(c.gamma)) ConfigFail("gamma", "must be finite and > 1");
  if (!(c.weight >= 0.0 && c.weight < 1.0)) ConfigFail("weight", "must lie in [0, 1)");
  if (c.truth < 0) ConfigFail("truth", "must be >= 0");
  if (c.stages < 0) ConfigFail("stages", "must be >= 0");
  if (c.kind == ScenarioKind::kHmDemo) {
    if (c.alpha_bits < 1) ConfigFail("alpha_bits", "must be >= 1");
    if (static_cast<std::size_t>(c.alpha_bits) < 4 * c.n) {
      ConfigFail("alpha_bits", "must be at least 4 * n = " + std::to_string(4 * c.n));
    }
  }
}

ScenarioConfig ConfigFromJson(const json& j) {
  if (!j.is_object()) ConfigFail("config", "expected an object");
  ScenarioConfig c;
  auto want_int = [](const json& v, const std::string& key) {
    if (!v.is_number_integer()) ConfigFail("config." + key, "expected an integer");
    return v.get<long long>();
  };
  auto want_num = [](const json& v, const std::string& key) {
    if (!v.is_number()) ConfigFail("config." + key, "expected a number");
    return v.get<double>();
  };
  auto want_str = [](const json& v, const std::string& key) {
    if (!v.is_string()) ConfigFail("config." + key, "expected a string");
    return v.get<std::string>();
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    if (key == "scenario") {
      c.kind = ParseScenario(want_str(v, key));
    } else if (key == "class") {
      c.class_path = want_str(v, key);
    } else if (key == "truth") {
      c.truth = static_cast<int>(want_int(v, key));
    } else if (key == "n") {
      const auto n = want_int(v, key);
      if (n < 1) ConfigFail("config.n", "must be >= 1");
      c.n = static_cast<std::size_t>(n);
    } else if (key == "depth") {
      c.depth = static_cast<int>(want_int(v, key));
    } else if (key == "max_depth") {
      c.max_depth = static_cast<int>(want_int(v, key));
    } else if (key == "seeds") {
      if (v.is_string()) {
        c.seeds = ParseSeeds(v.get<std::string>());
      } else if (v.is_array()) {
        c.seeds.clear();
        for (const auto& s : v) {
          if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
            ConfigFail("config.seeds", "expected non-negative integers");
          }
          c.seeds.push_back(s.get<std::uint64_t>());
        }
      } else {
        ConfigFail("config.seeds", "expected \"a..b\" or a list");
      }
    } else if (key == "gamma") {
      c.gamma = want_num(v, key);
    } else if (key == "out") {
      c.out_dir = want_str(v, key);
    } else if (key == "admit_semimeasures") {
      if (!v.is_boolean()) ConfigFail("config." + key, "expected a boolean");
      c.admit_semimeasures = v.get<bool>();
    } else if (key == "alpha_bits") {
      c.alpha_bits = static_cast<int>(want_int(v, key));
    } else if (key == "weight") {
      c.weight = want_num(v, key);
    } else if (key == "stages") {
      c.stages = static_cast<int>(want_int(v, key));
    } else {
      ConfigFail("config." + key, "unknown key");
    }
  }
  ValidateConfig(c);
  return c;
}

json ConfigToJson(const ScenarioConfig& c) {
  json seeds = json::array();
  for (auto s : c.seeds) seeds.push_back(s);
  return json{{"scenario", ScenarioName(c.kind)},
              {"class", c.class_path},
              {"truth", c.truth},
              {"n", c.n},
              {"depth", c.depth},
              {"max_depth", c.max_depth},
              {"seeds", seeds},
              {"gamma", c.gamma},
              {"out", c.out_dir},
              {"admit_semimeasures", c.admit_semimeasures},
              {"alpha_bits", c.alpha_bits},
              {"weight", c.weight},
              {"stages", c.stages}};
}

// ---------------------------------------------------------------------------
// Classes

ModelClass ReferenceTwoEntryClass() {
  return ModelClass({{MeasureSpec::Bernoulli(Rational(1, 2)).WithName("B(1/2)"), 1},
                     {MeasureSpec::Bernoulli(Rational(3, 4)).WithName("B(3/4)"), 2}});
}

ModelClass ReferenceBernoulli8Class() {
  const std::vector<std::pair<Rational, int>> entries = {
      {Rational(1, 8), 5}, {Rational(1, 4), 3}, {Rational(1, 3), 4},  {Rational(1, 2), 2},
      {Rational(2, 3), 4}, {Rational(3, 4), 3}, {Rational(7, 8), 5}, {Rational(15, 16), 5}};
  std::vector<std::pair<MeasureSpec, int>> list;
  for (const auto& [theta, length] : entries) {
    list.emplace_back(MeasureSpec::Bernoulli(theta).WithName("B(" + FormatRational(theta) + ")"),
                      length);
  }
  return ModelClass(std::move(list));
}

ModelClass LoadClass(const std::string& path) {
  if (path == "builtin:two") return ReferenceTwoEntryClass();
  if (path == "builtin:bernoulli8") return ReferenceBernoulli8Class();
  std::ifstream in(path, std::ios::binary);
  if (!in) ConfigFail("class", "cannot open class file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return ClassFromText(ss.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.message());
  }
}

// ---------------------------------------------------------------------------
// Lemma campaigns

CampaignResult RunConvexGapCampaign(std::uint64_t seed, std::size_t count) {
  CounterRng rng(seed);
  CampaignResult r;
  for (std::size_t i = 0; i < count; ++i) {
    const double p = SampleUnit(rng);
    const double q = SampleUnit(rng);
    Track(r, ConvexGap(p, q) - ConvexGapFloor(p, q), 1e-12);
  }
  return r;
}

CampaignResult RunConvexnCampaign(std::uint64_t seed, std::size_t count) {
  CounterRng rng(seed);
  CampaignResult r;
  std::vector<double> ps, qs;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = 1 + rng.NextU64() % 64;
    const bool near = (rng.NextU64() & 3) == 0;
    ps.resize(n);
    qs.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      ps[k] = SampleUnit(rng);
      if (near) {
        const double jitter = 1.0 + 1e-3 * (rng.NextUnitOpenClosed() - 0.5);
        qs[k] = std::min(1.0, ps[k] * jitter);
      } else {
        qs[k] = SampleUnit(rng);
      }
    }
    Track(r, ConvexnCheck(ps, qs).slack, BoundReport::kTolerance);
  }
  return r;
}

CampaignResult RunPinskerCampaign(std::uint64_t seed, std::size_t count) {
  CounterRng rng(seed);
  CampaignResult r;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t mode = rng.NextU64() % 16;
    double p = SampleOpenUnit(rng);
    if (mode == 0) p = 0.0;
    if (mode == 1) p = 1.0;
    const double q = SampleOpenUnit(rng);
    Track(r, KlBernoulli(p, q) - PinskerFloor(p, q), 1e-12);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Interval counterexample helpers

Rational RandomDyadicAlpha(std::uint64_t seed, int bits) {
  if (bits < 1) throw Error(ErrorKind::kDomain, "alpha needs at least one bit");
  CounterRng rng(seed ^ 0xA5A5A5A5A5A5A5A5ULL);
  mpz_class units = 0;
  int remaining = bits;
  while (remaining > 0) {
    const int take = std::min(remaining, 32);
    units <<= take;
    units += static_cast<unsigned long>(rng.NextU64() >> (64 - take));
    remaining -= take;
  }
  mpz_setbit(units.get_mpz_t(), 0);  // exactly `bits` fractional bits, alpha > 0
  Rational alpha(units, mpz_class(1) << bits);
  alpha.canonicalize();
  return alpha;
}

BitString BinaryExpansion(const Rational& alpha, std::size_t n) {
  if (sgn(alpha) < 0 || alpha > 1) throw Error(ErrorKind::kDomain, "alpha must lie in [0, 1]");
  Rational frac = alpha;
  std::vector<std::uint8_t> bits;
  bits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    frac *= 2;
    if (frac >= 1) {
      bits.push_back(1);
      frac -= 1;
    } else {
      bits.push_back(0);
    }
  }
  return BitString(std::move(bits));
}

// ---------------------------------------------------------------------------
// Scenarios

namespace {

json RunLemmas(const ScenarioConfig& c, const std::filesystem::path& dir, bool& all_pass) {
  struct Row {
    CampaignResult gap, convexn, pinsker;
  };
  std::vector<Row> rows(c.seeds.size());
  const std::size_t vectors = std::max<std::size_t>(1, c.n / 10);
  ParallelFor(c.seeds.size(), [&](std::size_t i) {
    const std::uint64_t s = c.seeds[i];
    rows[i].gap = RunConvexGapCampaign(s, c.n);
    rows[i].convexn = RunConvexnCampaign(s ^ 0x3C3C3C3C3C3C3C3CULL, vectors);
    rows[i].pinsker = RunPinskerCampaign(s ^ 0x5A5A5A5A5A5A5A5AULL, c.n);
  });
  std::ostringstream csv;
  csv << "seed,convex_gap_samples,convex_gap_violations,convex_gap_min_slack,"
         "convexn_samples,convexn_violations,convexn_min_slack,"
         "pinsker_samples,pinsker_violations,pinsker_min_slack\n";
  json per_seed = json::array();
  std::size_t violations = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    csv << c.seeds[i];
    for (const auto* cr : {&r.gap, &r.convexn, &r.pinsker}) {
      csv << ',' << cr->samples << ',' << cr->violations << ',' << FormatDouble(cr->min_slack);
      violations += cr->violations;
    }
    csv << '\n';
    per_seed.push_back(json{{"seed", c.seeds[i]},
                            {"convex_gap", CampaignJson(r.gap)},
                            {"convexn", CampaignJson(r.convexn)},
                            {"pinsker", CampaignJson(r.pinsker)}});
  }
  WriteFile(dir / "lemmas.csv", csv.str());
  all_pass = violations == 0;
  return json{{"per_seed", per_seed}, {"aggregate", {{"violations", violations}}}};
}

json RunSimulate(const ScenarioConfig& c, const ModelClass& mc, const std::filesystem::path& dir) {
  const MeasureSpec& truth = TruthSpec(mc, c.truth);
  std::vector<json> per_seed(c.seeds.size());
  const std::size_t window = std::max<std::size_t>(1, c.n / 4);
  ParallelFor(c.seeds.size(), [&](std::size_t i) {
    const std::uint64_t s = c.seeds[i];
    const BitString omega = SampleSequence(truth, c.n, s);
    const auto mdl = Trace(MdlPredictor{{c.gamma, c.admit_semimeasures}}, c.truth, mc, omega);
    const auto mix = Trace(MixturePredictor{}, c.truth, mc, omega);
    std::ostringstream a, b;
    WriteTraceCsv(mdl, a);
    WriteTraceCsv(mix, b);
    WriteFile(dir / ("trace_mdl_" + SeedTag(s) + ".csv"), a.str());
    WriteFile(dir / ("trace_mixture_" + SeedTag(s) + ".csv"), b.str());
    double max_err = 0.0;
    std::size_t hits = 0;
    for (std::size_t t = c.n - window; t < c.n; ++t) {
      const auto& st = mdl.steps[t];
      max_err = std::max(max_err, std::abs(st.pred_cond0 - st.truth_cond0));
      if (st.selected_id == c.truth) ++hits;
    }
    per_seed[i] = json{{"seed", s},
                       {"mdl_cumulative", mdl.cumulative()},
                       {"mixture_cumulative", mix.cumulative()},
                       {"window", window},
                       {"mdl_window_max_abs_err", max_err},
                       {"mdl_window_truth_fraction",
                        static_cast<double>(hits) / static_cast<double>(window)}};
  });
  double mdl_sum = 0, mdl_max = 0, mix_sum = 0, mix_max = 0;
  std::size_t converged = 0;
  for (const auto& r : per_seed) {
    const double m = r["mdl_cumulative"].get<double>();
    const double x = r["mixture_cumulative"].get<double>();
    mdl_sum += m;
    mix_sum += x;
    mdl_max = std::max(mdl_max, m);
    mix_max = std::max(mix_max, x);
    if (r["mdl_window_max_abs_err"].get<double>() < 0.01 &&
        r["mdl_window_truth_fraction"].get<double>() >= 0.95) {
      ++converged;
    }
  }
  const auto k = static_cast<double>(per_seed.size());
  return json{{"per_seed", per_seed},
              {"aggregate",
               {{"mdl_mean_cumulative", mdl_sum / k},
                {"mdl_max_cumulative", mdl_max},
                {"mixture_mean_cumulative", mix_sum / k},
                {"mixture_max_cumulative", mix_max},
                {"converged_seeds", converged},
                {"seeds", per_seed.size()}}}};
}

json RunExpect(const ScenarioConfig& c, const ModelClass& mc, const std::filesystem::path& dir) {
  TruthSpec(mc, c.truth);
  const auto mdl = ExpectedSqErrorIncrements(
      mc, c.truth, MdlPredictor{{c.gamma, c.admit_semimeasures}}, c.depth, c.max_depth);
  const auto mix = ExpectedSqErrorIncrements(mc, c.truth, MixturePredictor{}, c.depth, c.max_depth);
  std::ostringstream csv;
  csv << "depth,mdl_increment,mdl_total,mixture_increment,mixture_total\n";
  double mdl_total = 0, mix_total = 0;
  json rows = json::array();
  for (std::size_t d = 0; d < mdl.size(); ++d) {
    mdl_total += mdl[d];
    mix_total += mix[d];
    csv << d + 1 << ',' << FormatDouble(mdl[d]) << ',' << FormatDouble(mdl_total) << ','
        << FormatDouble(mix[d]) << ',' << FormatDouble(mix_total) << '\n';
    rows.push_back(json{{"depth", d + 1},
                        {"mdl_increment", mdl[d]},
                        {"mdl_total", mdl_total},
                        {"mixture_increment", mix[d]},
                        {"mixture_total", mix_total}});
  }
  WriteFile(dir / "expect.csv", csv.str());
  return json{{"per_depth", rows},
              {"aggregate", {{"mdl_total", mdl_total}, {"mixture_total", mix_total}}}};
}

json RunDeficiency(const ScenarioConfig& c, const ModelClass& mc, const std::filesystem::path& dir,
                   bool& all_pass) {
  const MeasureSpec& truth = TruthSpec(mc, c.truth);
  const double floor = -mc.entry(c.truth).code_length - 1.0;
  std::vector<json> per_seed(c.seeds.size());
  std::vector<double> sups(c.seeds.size());
  std::vector<char> floor_ok(c.seeds.size(), 1);
  ParallelFor(c.seeds.size(), [&](std::size_t i) {
    const std::uint64_t s = c.seeds[i];
    const BitString omega = SampleSequence(truth, c.n, s);
    const auto profile = DeficiencyProfile(mc, c.truth, omega);
    std::ostringstream csv;
    csv << "length,deficiency,running_sup\n";
    double min_d = profile.per_prefix.front();
    for (std::size_t k = 0; k < profile.per_prefix.size(); ++k) {
      csv << k << ',' << FormatDouble(profile.per_prefix[k]) << ','
          << FormatDouble(profile.running_sup[k]) << '\n';
      min_d = std::min(min_d, profile.per_prefix[k]);
    }
    WriteFile(dir / ("deficiency_" + SeedTag(s) + ".csv"), csv.str());
    sups[i] = profile.sup;
    floor_ok[i] = min_d >= floor - 1e-9;
    per_seed[i] = json{{"seed", s},
                       {"D", profile.sup},
                       {"argmax_length", profile.argmax_length},
                       {"min_deficiency", min_d},
                       {"final_deficiency", profile.per_prefix.back()}};
  });
  const auto shells = DeficiencyShells(sups);
  std::ostringstream csv;
  csv << "d,shell_count,tail_count,tail_fraction,mass_bound,tolerance,pass\n";
  bool shells_ok = true;
  for (const auto& r : shells) {
    csv << r.d << ',' << r.shell_count << ',' << r.tail_count << ',' << FormatDouble(r.tail_fraction)
        << ',' << FormatDouble(r.mass_bound) << ',' << FormatDouble(r.tolerance) << ','
        << (r.pass ? 1 : 0) << '\n';
    shells_ok = shells_ok && r.pass;
  }
  WriteFile(dir / "shells.csv", csv.str());
  const bool floors = std::all_of(floor_ok.begin(), floor_ok.end(), [](char v) { return v != 0; });
  all_pass = floors && shells_ok;
  double max_d = *std::max_element(sups.begin(), sups.end());
  return json{{"per_seed", per_seed},
              {"aggregate",
               {{"max_D", max_d},
                {"deficiency_floor", floor},
                {"floor_ok", floors},
                {"shells_ok", shells_ok}}}};
}

json RunBounds(const ScenarioConfig& c, const ModelClass& mc, const std::filesystem::path& dir,
               bool& all_pass) {
  const MeasureSpec& truth = TruthSpec(mc, c.truth);
  const ModelClass extended = ModelClass::WithPairwiseAverages(mc);
  std::vector<json> per_seed(c.seeds.size());
  std::vector<std::string> vovk_rows(c.seeds.size());
  std::vector<char> ok(c.seeds.size(), 1);
  ParallelFor(c.seeds.size(), [&](std::size_t i) {
    const std::uint64_t s = c.seeds[i];
    const BitString omega = SampleSequence(truth, c.n, s);
    std::ostringstream rows;
    std::size_t vovk_pass = 0, vovk_total = 0;
    for (const auto& e : mc.entries()) {
      if (!e.spec.IsMeasure()) continue;
      const BoundReport r = VovkBoundCheck(extended, c.truth, e.id, omega);
      rows << s << ',' << e.id << ',' << FormatDouble(*r.log2_C) << ',' << FormatDouble(*r.log2_c)
           << ',' << FormatDouble(*r.K_pair) << ',' << FormatDouble(r.sum) << ','
           << FormatDouble(r.bound) << ',' << FormatDouble(r.slack) << ',' << (r.pass ? 1 : 0)
           << ',' << r.failed_link << '\n';
      ++vovk_total;
      if (r.pass) ++vovk_pass;
    }
    vovk_rows[i] = rows.str();
    const PerSequenceReport ps = PerSequenceBound(mc, c.truth, omega, c.gamma);
    ok[i] = ps.report.pass && vovk_pass == vovk_total;
    per_seed[i] = json{{"seed", s},
                       {"vovk_pass", vovk_pass},
                       {"vovk_total", vovk_total},
                       {"per_sequence", BoundReportToJson(ps.report)},
                       {"selected_models", ps.models.size()},
                       {"count_exponent", ps.count_exponent},
                       {"count_ok", ps.count_ok},
                       {"cutoff_ok", ps.cutoff_ok}};
  });
  std::ostringstream vovk;
  vovk << "seed,q_id,log2_C,log2_c,K_pair,sum,bound,slack,pass,failed_link\n";
  for (const auto& r : vovk_rows) vovk << r;
  WriteFile(dir / "vovk.csv", vovk.str());

  const int kl_depth = std::min(c.depth, kMaxKlDepth);
  json kl = json::object();
  bool kl_ok = true;
  std::ostringstream klcsv;
  klcsv << "predictor,k,kl_direct,kl_chain,pinsker_sum,pinsker_bound,log2_C\n";
  const std::vector<std::pair<std::string, Predictor>> preds = {
      {"mixture", MixturePredictor{}}, {"mdl", MdlPredictor{{c.gamma, c.admit_semimeasures}}}};
  for (const auto& [name, pred] : preds) {
    const auto rep = KlChainCheck(mc, c.truth, pred, kl_depth);
    for (const auto& lv : rep.levels) {
      klcsv << name << ',' << lv.k << ',' << FormatDouble(lv.kl_direct) << ','
            << FormatDouble(lv.kl_chain) << ',' << FormatDouble(lv.pinsker_sum) << ','
            << FormatDouble(lv.pinsker_bound) << ',' << FormatDouble(lv.log2_C) << '\n';
    }
    kl[name] = json{{"max_chain_error", rep.max_chain_error},
                    {"chain_ok", rep.chain_ok},
                    {"pinsker_ok", rep.pinsker_ok},
                    {"domination_ok", rep.domination_ok}};
    kl_ok = kl_ok && rep.pass();
  }
  WriteFile(dir / "kl_chain.csv", klcsv.str());
  std::size_t passed = 0;
  for (char v : ok) passed += v ? 1 : 0;
  all_pass = passed == ok.size() && kl_ok;
  return json{{"per_seed", per_seed},
              {"kl_chain", kl},
              {"aggregate", {{"seeds_passed", passed}, {"seeds", ok.size()}, {"kl_ok", kl_ok}}}};
}

}  // namespace

RunSummary HmDemo(const ScenarioConfig& c) {
  ValidateConfig(c);
  const auto start = std::chrono::steady_clock::now();
  const auto dir = PrepareOutDir(c);

  const ModelClass base = LoadClass(c.class_path);
  int truth_id = -1;
  for (const auto& e : base.entries()) {
    if (e.spec.SameAs(MeasureSpec::Bernoulli(Rational(1, 2)))) {
      truth_id = e.id;
      break;
    }
  }
  if (truth_id < 0) ConfigFail("class", "hm-demo needs a class containing bernoulli(1/2)");
  // Smallest code length for the interval entry that keeps Kraft.
  const Rational room = Rational(1) - base.KraftSum();
  int q_length = -1;
  for (int l = 0; l <= 62; ++l) {
    if (Rational(1, mpz_class(1) << l) <= room) {
      q_length = l;
      break;
    }
  }
  if (q_length < 0) ConfigFail("class", "no Kraft room left for the interval entry");

  const Rational w(c.weight);
  const MeasureSpec uniform = MeasureSpec::Bernoulli(Rational(1, 2)).WithName("uniform");

  std::vector<json> per_seed(c.seeds.size());
  std::vector<char> invariants_ok(c.seeds.size(), 1);
  ParallelFor(c.seeds.size(), [&](std::size_t i) {
    const std::uint64_t s = c.seeds[i];
    const Rational alpha = RandomDyadicAlpha(s, c.alpha_bits);
    const BitString omega = BinaryExpansion(alpha, c.n);
    const MeasureSpec q_alpha = MeasureSpec::Interval(alpha, c.alpha_bits).WithName("Q_alpha");

    const ModelClass mix_class({{q_alpha, 1}, {uniform, 1}});
    const MixtureWeights weights = MixtureWeights::Explicit({w, Rational(1) - w});
    const auto mix = Trace(MixturePredictor{weights}, 1, mix_class, omega);

    std::vector<std::pair<MeasureSpec, int>> list;
    for (const auto& e : base.entries()) list.emplace_back(e.spec, e.code_length);
    list.emplace_back(q_alpha, q_length);
    const ModelClass mdl_class(std::move(list));
    const int q_id = static_cast<int>(mdl_class.size()) - 1;
    const auto mdl = Trace(MdlPredictor{{c.gamma, c.admit_semimeasures}}, truth_id, mdl_class, omega);

    // Q_alpha(0 | x) must be exactly 1 at every zero bit of alpha.
    MeasureCursor qc(q_alpha);
    bool certainty_ok = true;
    std::size_t zeros = 0, far = 0, semimeasure_picks = 0;
    double mdl_dev_after_50 = 0.0;
    std::ostringstream csv;
    csv << "step,alpha_next_bit,truth_cond0,mixture_pred0,mixture_sq_err,mdl_pred0,mdl_sq_err,"
           "mdl_selected_id\n";
    for (std::size_t t = 0; t < c.n; ++t) {
      const int bit = omega[t];
      const auto& ms = mix.steps[t];
      const auto& hs = mdl.steps[t];
      if (bit == 0) {
        ++zeros;
        if (qc.CondProbExact(0) != 1) certainty_ok = false;
        if (std::abs(ms.pred_cond0 - 0.5) > 0.2) ++far;
      }
      if (hs.selected_id == q_id) ++semimeasure_picks;
      if (t >= 50) mdl_dev_after_50 = std::max(mdl_dev_after_50, std::abs(hs.pred_cond0 - 0.5));
      csv << t << ',' << bit << ',' << FormatDouble(ms.truth_cond0) << ','
          << FormatDouble(ms.pred_cond0) << ',' << FormatDouble(ms.sq_err) << ','
          << FormatDouble(hs.pred_cond0) << ',' << FormatDouble(hs.sq_err) << ',' << hs.selected_id
          << '\n';
      if (t + 1 < c.n) qc.Push(bit);
    }
    WriteFile(dir / ("hm_trace_" + SeedTag(s) + ".csv"), csv.str());

    json stages = json::array();
    if (c.stages > 0) {
      std::ostringstream st;
      st << "stage,approx_bits,mixture_cumulative,far_fraction\n";
      for (int k = 1; k <= c.stages; ++k) {
        const int b = static_cast<int>((static_cast<long long>(k) * c.alpha_bits + c.stages - 1) /
                                       c.stages);
        const mpz_class scale = mpz_class(1) << b;
        mpz_class units = alpha.get_num() * scale / alpha.get_den();
        if (sgn(units) == 0) continue;
        Rational approx(units, scale);
        approx.canonicalize();
        const ModelClass staged_class(
            {{MeasureSpec::Interval(approx, c.alpha_bits), 1}, {uniform, 1}});
        const auto tr = Trace(MixturePredictor{weights}, 1, staged_class, omega);
        std::size_t staged_far = 0;
        for (std::size_t t = 0; t < c.n; ++t) {
          if (omega[t] == 0 && std::abs(tr.steps[t].pred_cond0 - 0.5) > 0.2) ++staged_far;
        }
        const double frac = zeros ? static_cast<double>(staged_far) / zeros : 0.0;
        st << k << ',' << b << ',' << FormatDouble(tr.cumulative()) << ',' << FormatDouble(frac)
           << '\n';
        stages.push_back(json{{"stage", k},
                              {"approx_bits", b},
                              {"mixture_cumulative", tr.cumulative()},
                              {"far_fraction", frac}});
      }
      WriteFile(dir / ("hm_stages_" + SeedTag(s) + ".csv"), st.str());
    }

    const double far_fraction = zeros ? static_cast<double>(far) / zeros : 0.0;
    const bool semimeasure_ok = c.admit_semimeasures || semimeasure_picks == 0;
    invariants_ok[i] = certainty_ok && semimeasure_ok;
    const bool thresholds = mix.cumulative() >= 5.0 * mdl.cumulative() && far_fraction >= 0.3 &&
                            mdl_dev_after_50 < 0.05;
    per_seed[i] = json{{"seed", s},
                       {"mixture_cumulative", mix.cumulative()},
                       {"mdl_cumulative", mdl.cumulative()},
                       {"zero_positions", zeros},
                       {"far_zero_positions", far},
                       {"far_fraction", far_fraction},
                       {"mdl_max_dev_after_50", mdl_dev_after_50},
                       {"mdl_semimeasure_selections", semimeasure_picks},
                       {"certainty_ok", certainty_ok},
                       {"thresholds_met", thresholds},
                       {"stages", stages}};
  });

  RunSummary out;
  out.all_pass = std::all_of(invariants_ok.begin(), invariants_ok.end(), [](char v) { return v != 0; });
  std::size_t met = 0;
  for (const auto& r : per_seed) met += r["thresholds_met"].get<bool>() ? 1 : 0;
  out.summary = json{{"scenario", ConfigToJson(c)},
                     {"tool_version", kToolVersion},
                     {"per_seed", per_seed},
                     {"aggregate", {{"thresholds_met_seeds", met}, {"seeds", per_seed.size()}}},
                     {"all_pass", out.all_pass}};
  WriteFile(dir / "summary.json", out.summary.dump(2) + "\n");
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RunSummary RunScenario(const ScenarioConfig& c) {
  if (c.kind == ScenarioKind::kHmDemo) return HmDemo(c);
  ValidateConfig(c);
  const auto start = std::chrono::steady_clock::now();
  const auto dir = PrepareOutDir(c);
  RunSummary out;
  json body;
  bool all_pass = true;
  if (c.kind == ScenarioKind::kLemmas) {
    body = RunLemmas(c, dir, all_pass);
  } else {
    const ModelClass mc = LoadClass(c.class_path);
    switch (c.kind) {
      case ScenarioKind::kSimulate: body = RunSimulate(c, mc, dir); break;
      case ScenarioKind::kExpect: body = RunExpect(c, mc, dir); break;
      case ScenarioKind::kDeficiency: body = RunDeficiency(c, mc, dir, all_pass); break;
      case ScenarioKind::kBounds: body = RunBounds(c, mc, dir, all_pass); break;
      default: break;
    }
  }
  body["scenario"] = ConfigToJson(c);
  body["tool_version"] = kToolVersion;
  body["all_pass"] = all_pass;
  out.all_pass = all_pass;
  out.summary = std::move(body);
  WriteFile(dir / "summary.json", out.summary.dump(2) + "\n");
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace bestexp
