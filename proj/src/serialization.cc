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

#include "bestexp/serialization.h"

#include <algorithm>
#include <cmath>

#include "bestexp/error.h"

namespace bestexp {

using nlohmann::json;

namespace {

[[noreturn]] void Fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::kParse, path + ": " + what);
}

const json& Field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) Fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) Fail(path + "." + key, "missing field");
  return *it;
}

Rational RationalField(const json& params, const std::string& key, const std::string& path) {
  const json& v = Field(params, key, path);
  const std::string field = path + "." + key;
  if (v.is_string()) {
    try {
      return ParseRational(v.get<std::string>());
    } catch (const Error& e) {
      Fail(field, e.message());
    }
  }
  if (v.is_number_integer()) return Rational(v.get<long>());
  Fail(field, "expected a rational string such as \"3/4\"");
}

int IntField(const json& obj, const std::string& key, const std::string& path) {
  const json& v = Field(obj, key, path);
  if (!v.is_number_integer()) Fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

template <typename F>
auto WithPath(const std::string& path, F&& make) -> decltype(make()) {
  try {
    return make();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParse) throw;
    throw Error(e.kind(), path + ": " + e.message());
  }
}

}  // namespace

json SpecToJson(const MeasureSpec& spec) {
  json j;
  j["family"] = FamilyName(spec.family());
  json params = json::object();
  switch (spec.family()) {
    case Family::kBernoulli:
      params["theta"] = FormatRational(spec.bernoulli().theta);
      break;
    case Family::kMarkov1:
      params["theta0"] = FormatRational(spec.markov1().theta0);
      params["theta1"] = FormatRational(spec.markov1().theta1);
      params["theta_init"] = FormatRational(spec.markov1().theta_init);
      break;
    case Family::kInterval:
      params["alpha"] = FormatRational(spec.interval().alpha);
      params["precision_bits"] = spec.interval().precision_bits;
      break;
    case Family::kAverage:
      params["left"] = SpecToJson(*spec.average().left);
      params["right"] = SpecToJson(*spec.average().right);
      break;
  }
  j["params"] = std::move(params);
  if (spec.name()) j["name"] = *spec.name();
  return j;
}

MeasureSpec SpecFromJson(const json& j, const std::string& path) {
  const json& fam = Field(j, "family", path);
  if (!fam.is_string()) Fail(path + ".family", "expected a string");
  const std::string family = fam.get<std::string>();
  const std::string ppath = path + ".params";
  const json& params = Field(j, "params", path);
  if (!params.is_object()) Fail(ppath, "expected an object");
  MeasureSpec spec = WithPath(path, [&]() -> MeasureSpec {
    if (family == "bernoulli") {
      return MeasureSpec::Bernoulli(RationalField(params, "theta", ppath));
    }
    if (family == "markov1") {
      return MeasureSpec::Markov1(RationalField(params, "theta0", ppath),
                                  RationalField(params, "theta1", ppath),
                                  RationalField(params, "theta_init", ppath));
    }
    if (family == "interval") {
      return MeasureSpec::Interval(RationalField(params, "alpha", ppath),
                                   IntField(params, "precision_bits", ppath));
    }
    if (family == "average") {
      return MeasureSpec::Average(SpecFromJson(Field(params, "left", ppath), ppath + ".left"),
                                  SpecFromJson(Field(params, "right", ppath), ppath + ".right"));
    }
    Fail(path + ".family", "unknown family '" + family + "'");
  });
  if (auto it = j.find("name"); it != j.end()) {
    if (!it->is_string()) Fail(path + ".name", "expected a string");
    spec = spec.WithName(it->get<std::string>());
  }
  return spec;
}

ModelClass ClassFromJson(const json& j) {
  const json* list = &j;
  bool averages = false;
  std::string base = "entries";
  if (j.is_object()) {
    list = &Field(j, "entries", "class");
    if (auto it = j.find("pairwise_averages"); it != j.end()) {
      if (!it->is_boolean()) Fail("class.pairwise_averages", "expected a boolean");
      averages = it->get<bool>();
    }
  }
  if (!list->is_array()) Fail(base, "expected a list of entries");
  if (list->empty()) throw Error(ErrorKind::kDomain, base + ": model class needs at least one entry");
  std::vector<std::pair<MeasureSpec, int>> entries;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const std::string path = base + "[" + std::to_string(i) + "]";
    const json& e = (*list)[i];
    const int length = IntField(e, "code_length", path);
    if (length < 0) throw Error(ErrorKind::kDomain, path + ".code_length: must be >= 0");
    entries.emplace_back(SpecFromJson(e, path), length);
  }
  ModelClass mc(std::move(entries));
  return averages ? ModelClass::WithPairwiseAverages(mc) : mc;
}

ModelClass ClassFromText(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min(e.byte, text.size());
    const auto upto = text.substr(0, byte);
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(upto.begin(), upto.end(), '\n'));
    const std::size_t nl = upto.rfind('\n');
    const std::size_t column = nl == std::string_view::npos ? byte : byte - nl - 1;
    throw Error(ErrorKind::kParse, "line " + std::to_string(line) + ", column " +
                                       std::to_string(column) + ": " + e.what());
  }
  return ClassFromJson(j);
}

json ClassToJson(const ModelClass& model_class) {
  json list = json::array();
  for (const auto& e : model_class.entries()) {
    json j = SpecToJson(e.spec);
    j["code_length"] = e.code_length;
    list.push_back(std::move(j));
  }
  return list;
}

json BoundReportToJson(const BoundReport& r) {
  json j;
  auto opt = [&](const char* key, const auto& v) {
    if (v) j[key] = *v;
    else j[key] = nullptr;
  };
  opt("log2_C", r.log2_C);
  opt("log2_c", r.log2_c);
  opt("K_pair", r.K_pair);
  opt("D", r.D);
  opt("L_P", r.L_P);
  opt("L_Q", r.L_Q);
  j["C"] = r.log2_C ? json(std::exp2(*r.log2_C)) : json(nullptr);
  j["c"] = r.log2_c ? json(std::exp2(*r.log2_c)) : json(nullptr);
  j["sum"] = r.sum;
  j["bound"] = r.bound;
  j["slack"] = r.slack;
  j["pass"] = r.pass;
  j["failed_link"] = r.failed_link;
  return j;
}

}  // namespace bestexp
