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

#include "drcnet/model.hpp"

namespace drcnet::nn {

// Model file: a text header terminated by a line "end", followed by the raw
// parameter tensors as little-endian float32 in declaration order.
//
//   drcnet-model 1
//   input 200 200 1
//   stage 32 same
//   ...
//   fc 128
//   output 2
//   seed 42
//   train learning_rate=0.001 decay=0.9 epsilon=1e-08 batch_size=32 epochs=20 init=he_uniform
//   config key=value            (zero or more)
//   param conv1.weight 32 3 3 1
//   ...
//   blob_bytes 638984
//   crc32 1a2b3c4d
//   end
inline constexpr int kModelFormatVersion = 1;

struct ModelHeader {
  int version = kModelFormatVersion;
  ModelSpec spec;
  std::uint64_t seed = 0;
  TrainConfig train;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<ParamInfo> params;
  std::uint64_t blob_bytes = 0;
  std::uint32_t crc32 = 0;
};

// CRC-32 of the serialized weight blob, as recorded in the header.
std::uint32_t model_checksum(const Model& model);

void save_model(std::ostream& out, const Model& model,
                const std::vector<std::pair<std::string, std::string>>& config = {});
void save_model(const std::filesystem::path& path, const Model& model,
                const std::vector<std::pair<std::string, std::string>>& config = {});

// Reads only the header. Throws VersionMismatch or ParseError.
ModelHeader read_model_header(std::istream& in);
ModelHeader read_model_header(const std::filesystem::path& path);

// Throws VersionMismatch, ParseError, or ChecksumError (bad or short blob).
Model load_model(std::istream& in);
Model load_model(const std::filesystem::path& path);

}  // namespace drcnet::nn
