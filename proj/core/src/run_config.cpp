// Copyright 2026 The drcnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "drcnet/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include "drcnet/errors.hpp"

namespace drcnet {
namespace {

template <typename T>
T parse_value(const std::string& key, const std::string& v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ParseError(0, "bad value '" + v + "' for " + key);
  return out;
}

template <typename T>
std::string show(T v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field num(T RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = parse_value<T>(k, v); },
          [member](const RunConfig& c) { return show(c.*member); }};
}

template <typename T, typename S>
Field nested(S RunConfig::*outer, T S::*member) {
  return {[=](RunConfig& c, const std::string& k, const std::string& v) { (c.*outer).*member = parse_value<T>(k, v); },
          [=](const RunConfig& c) { return show((c.*outer).*member); }};
}

Field text(std::string RunConfig::*member) {
  return {[member](RunConfig& c, const std::string&, const std::string& v) { c.*member = v; },
          [member](const RunConfig& c) { return c.*member; }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      {"seed", num(&RunConfig::seed)},
      {"rules", num(&RunConfig::rules)},
      {"min_width", nested(&RunConfig::limits, &RuleSet::min_width)},
      {"min_spacing", nested(&RunConfig::limits, &RuleSet::min_spacing)},
      {"eol_spacing", nested(&RunConfig::limits, &RuleSet::eol_spacing)},
      {"eol_end_max_width", nested(&RunConfig::limits, &RuleSet::eol_end_max_width)},
      {"seeds", num(&RunConfig::seeds)},
      {"variants", num(&RunConfig::variants)},
      {"extent_x", num(&RunConfig::extent_x)},
      {"extent_y", num(&RunConfig::extent_y)},
      {"window", num(&RunConfig::window)},
      {"stride", num(&RunConfig::stride)},
      {"groups", num(&RunConfig::groups)},
      {"per_class_cap", num(&RunConfig::per_class_cap)},
      {"skip_partial", num(&RunConfig::skip_partial)},
      {"train_fraction", num(&RunConfig::train_fraction)},
      {"val_fraction", num(&RunConfig::val_fraction)},
      {"test_fraction", num(&RunConfig::test_fraction)},
      {"preset", text(&RunConfig::preset)},
      {"learning_rate", nested(&RunConfig::train, &nn::TrainConfig::learning_rate)},
      {"decay", nested(&RunConfig::train, &nn::TrainConfig::decay)},
      {"epsilon", nested(&RunConfig::train, &nn::TrainConfig::epsilon)},
      {"batch_size", nested(&RunConfig::train, &nn::TrainConfig::batch_size)},
      {"epochs", nested(&RunConfig::train, &nn::TrainConfig::epochs)},
      {"reps", num(&RunConfig::reps)},
      {"dataset", text(&RunConfig::dataset)},
      {"model", text(&RunConfig::model)},
      {"layout", text(&RunConfig::layout)},
      {"out", text(&RunConfig::out)},
      {"split", text(&RunConfig::split)},
  };
  return f;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

LabelSpace RunConfig::label_space() const {
  if (rules == 1) return LabelSpace::kOneRule;
  if (rules == 3) return LabelSpace::kThreeRule;
  throw SpecError("rules must be 1 or 3, got " + std::to_string(rules));
}

nn::Preset RunConfig::model_preset() const {
  if (preset.empty()) return label_space() == LabelSpace::kOneRule ? nn::Preset::kOneRule : nn::Preset::kThreeRule;
  if (preset == "one_rule") return nn::Preset::kOneRule;
  if (preset == "three_rule") return nn::Preset::kThreeRule;
  throw SpecError("preset must be one_rule or three_rule, got '" + preset + "'");
}

ForgeConfig RunConfig::forge_config() const {
  ForgeConfig f;
  f.seed = seed;
  f.seeds = seeds;
  f.variants = variants;
  f.label_space = label_space();
  f.seed_layout.extent_x = extent_x;
  f.seed_layout.extent_y = extent_y;
  f.inject.groups = groups;
  f.rules = limits;
  f.window = window;
  f.stride = stride;
  f.fractions = {train_fraction, val_fraction, test_fraction};
  f.per_class_cap = per_class_cap;
  f.skip_partial = skip_partial != 0;
  return f;
}

void RunConfig::validate() const {
  (void)label_space();
  (void)model_preset();
  limits.validate();
  train.validate();
  if (seeds <= 0 || variants <= 0) throw SpecError("seeds and variants must be positive");
  if (window <= 0 || stride <= 0) throw SpecError("window and stride must be positive");
  if (extent_x < window || extent_y < window) throw SpecError("extent is smaller than the window");
  if (groups <= 0) throw SpecError("groups must be positive");
  if (skip_partial != 0 && skip_partial != 1) throw SpecError("skip_partial must be 0 or 1");
  if (reps <= 0) throw SpecError("reps must be positive");
  if (train_fraction < 0 || val_fraction < 0 || test_fraction < 0 ||
      std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9)
    throw SpecError("split fractions must be non-negative and sum to 1");
}

bool set_run_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& [name, field] : fields())
    if (name == key) {
      field.set(cfg, key, value);
      return true;
    }
  return false;
}

RunConfig read_run_config(std::istream& in, RunConfig base) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (!set_run_config_value(base, key, value)) throw ParseError(lineno, "unknown key '" + key + "'");
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(lineno, "bad value '" + value + "' for " + key);
    }
  }
  return base;
}

RunConfig read_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  return read_run_config(in, std::move(base));
}

std::vector<std::pair<std::string, std::string>> run_config_pairs(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, field] : fields()) out.emplace_back(name, field.get(cfg));
  return out;
}

void write_run_config(std::ostream& out, const RunConfig& cfg) {
  for (const auto& [k, v] : run_config_pairs(cfg)) out << k << " = " << v << '\n';
}

}  // namespace drcnet
