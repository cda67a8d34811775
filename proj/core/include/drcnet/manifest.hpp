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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "drcnet/geometry.hpp"
#include "drcnet/labels.hpp"

namespace drcnet {

struct Origin {
  Coord x = 0;
  Coord y = 0;
  friend bool operator==(const Origin&, const Origin&) = default;
  friend auto operator<=>(const Origin&, const Origin&) = default;
};

enum class Split : std::uint8_t { kTrain, kVal, kTest };
std::string_view split_name(Split s);
Split parse_split(std::string_view s);  // throws DataError

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  ClipLabel label = ClipLabel::kNdrc;
  Origin origin;
  std::string source;
  Split split = Split::kTrain;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  static constexpr int kFormatVersion = 1;

  std::uint64_t seed = 0;
  LabelSpace label_space = LabelSpace::kThreeRule;
  RuleSet rules;
  // Producing configuration, carried verbatim in the header block.
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<ManifestEntry> entries;

  std::map<ClipLabel, std::size_t> counts() const;
  std::size_t count(Split s) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

void write_manifest(std::ostream& out, const DatasetManifest& manifest);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
// Throws ParseError (with line number) on malformed or truncated input.
DatasetManifest read_manifest(std::istream& in);
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace drcnet
