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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "drcnet/forge.hpp"
#include "drcnet/model.hpp"

namespace drcnet {

// Everything a command-line run depends on. Every random draw derives from
// `seed`. Stored as flat `key = value` lines; '#' starts a comment.
struct RunConfig {
  std::uint64_t seed = 1;
  int rules = 3;  // 1: M1.1 only, 3: M1.1, M1.6, M1.7
  RuleSet limits;

  // dataset
  int seeds = 50;
  int variants = 100;
  Coord extent_x = 2000;
  Coord extent_y = 2000;
  Coord window = 200;
  Coord stride = 150;
  int groups = 3;
  std::size_t per_class_cap = 0;
  int skip_partial = 0;  // 1: drop windows that cut through a marker
  double train_fraction = 0.80;
  double val_fraction = 0.15;
  double test_fraction = 0.05;

  // model and training
  std::string preset = "";  // one_rule | three_rule; empty follows `rules`
  nn::TrainConfig train;

  // scanning and benchmarking
  int reps = 3;

  // paths
  std::string dataset = "data";
  std::string model = "model.bin";
  std::string layout;
  std::string out;
  std::string split = "test";

  LabelSpace label_space() const;
  nn::Preset model_preset() const;  // throws SpecError
  ForgeConfig forge_config() const;

  // Throws SpecError on out-of-range values.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Throws ParseError for malformed lines, unknown keys, or bad values.
RunConfig read_run_config(std::istream& in, RunConfig base = {});
RunConfig read_run_config(const std::filesystem::path& path, RunConfig base = {});
// Applies one key/value; returns false for an unknown key. Throws ParseError
// for a bad value.
bool set_run_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::vector<std::pair<std::string, std::string>> run_config_pairs(const RunConfig& cfg);
void write_run_config(std::ostream& out, const RunConfig& cfg);

}  // namespace drcnet
