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

#include "drcnet/model_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "drcnet/errors.hpp"

namespace drcnet::nn {
namespace {

std::string fmt_float(float v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

template <typename T>
T parse_num(const std::string& tok, std::size_t line) {
  T v{};
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) throw ParseError(line, "bad number '" + tok + "'");
  return v;
}

std::vector<std::uint8_t> encode_blob(const Model& model) {
  std::vector<std::uint8_t> blob;
  blob.reserve(model.parameter_count() * 4);
  for (const auto& t : model.params()) {
    for (float v : t.values()) {
      const auto bits = std::bit_cast<std::uint32_t>(v);
      for (int b = 0; b < 4; ++b) blob.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
    }
  }
  return blob;
}

std::uint32_t crc_of(const std::vector<std::uint8_t>& blob) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  const std::uint8_t* p = blob.data();
  std::size_t left = blob.size();
  while (left > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    crc = ::crc32(crc, p, chunk);
    p += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::uint32_t model_checksum(const Model& model) { return crc_of(encode_blob(model)); }

void save_model(std::ostream& out, const Model& model, const std::vector<std::pair<std::string, std::string>>& config) {
  const ModelSpec& s = model.spec();
  const TrainConfig& t = model.train_config;
  const auto blob = encode_blob(model);
  out << "drcnet-model " << kModelFormatVersion << '\n';
  out << "input " << s.input_h << ' ' << s.input_w << ' ' << s.input_c << '\n';
  for (const StageSpec& st : s.stages)
    out << "stage " << st.filters << ' ' << (st.padding == Padding::kSame ? "same" : "valid") << '\n';
  out << "fc " << s.fc_size << '\n';
  out << "output " << s.output_dim << '\n';
  out << "seed " << model.seed << '\n';
  out << "train learning_rate=" << fmt_float(t.learning_rate) << " decay=" << fmt_float(t.decay)
      << " epsilon=" << fmt_float(t.epsilon) << " batch_size=" << t.batch_size << " epochs=" << t.epochs
      << " seed=" << t.seed << " init=" << t.init << '\n';
  for (const auto& [k, v] : config) out << "config " << k << '=' << v << '\n';
  for (const ParamInfo& p : model.param_info()) {
    out << "param " << p.name;
    for (std::size_t d : p.shape) out << ' ' << d;
    out << '\n';
  }
  char crc[16];
  std::snprintf(crc, sizeof crc, "%08x", crc_of(blob));
  out << "blob_bytes " << blob.size() << '\n';
  out << "crc32 " << crc << '\n';
  out << "end\n";
  out.write(reinterpret_cast<const char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
}

void save_model(const std::filesystem::path& path, const Model& model,
                const std::vector<std::pair<std::string, std::string>>& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model " + path.string());
  save_model(out, model, config);
  if (!out) throw DataError("short write to " + path.string());
}

ModelHeader read_model_header(std::istream& in) {
  ModelHeader h;
  h.spec.stages.clear();
  std::string line;
  std::size_t lineno = 0;
  bool ended = false, have_magic = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    auto need = [&](std::size_t n) {
      if (tok.size() != n) throw ParseError(lineno, "'" + key + "' expects " + std::to_string(n) + " fields");
    };
    if (!have_magic) {
      if (key != "drcnet-model") throw ParseError(lineno, "not a drcnet model file");
      need(1);
      h.version = parse_num<int>(tok[0], lineno);
      if (h.version != kModelFormatVersion)
        throw VersionMismatch("model format version " + std::to_string(h.version) + ", this build reads " +
                              std::to_string(kModelFormatVersion));
      have_magic = true;
    } else if (key == "input") {
      need(3);
      h.spec.input_h = parse_num<int>(tok[0], lineno);
      h.spec.input_w = parse_num<int>(tok[1], lineno);
      h.spec.input_c = parse_num<int>(tok[2], lineno);
    } else if (key == "stage") {
      need(2);
      if (tok[1] != "same" && tok[1] != "valid") throw ParseError(lineno, "padding must be same or valid");
      h.spec.stages.push_back({parse_num<int>(tok[0], lineno), tok[1] == "same" ? Padding::kSame : Padding::kValid});
    } else if (key == "fc") {
      need(1);
      h.spec.fc_size = parse_num<int>(tok[0], lineno);
    } else if (key == "output") {
      need(1);
      h.spec.output_dim = parse_num<int>(tok[0], lineno);
    } else if (key == "seed") {
      need(1);
      h.seed = parse_num<std::uint64_t>(tok[0], lineno);
    } else if (key == "train") {
      for (const std::string& kv : tok) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "train field needs key=value");
        const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
        if (k == "learning_rate") h.train.learning_rate = parse_num<float>(v, lineno);
        else if (k == "decay") h.train.decay = parse_num<float>(v, lineno);
        else if (k == "epsilon") h.train.epsilon = parse_num<float>(v, lineno);
        else if (k == "batch_size") h.train.batch_size = parse_num<int>(v, lineno);
        else if (k == "epochs") h.train.epochs = parse_num<int>(v, lineno);
        else if (k == "seed") h.train.seed = parse_num<std::uint64_t>(v, lineno);
        else if (k == "init") h.train.init = v;
        else throw ParseError(lineno, "unknown train field '" + k + "'");
      }
    } else if (key == "config") {
      const std::string rest = line.substr(line.find(' ') + 1);
      const auto eq = rest.find('=');
      if (eq == std::string::npos) throw ParseError(lineno, "config line needs key=value");
      h.config.emplace_back(rest.substr(0, eq), rest.substr(eq + 1));
    } else if (key == "param") {
      if (tok.size() < 2) throw ParseError(lineno, "param needs a name and a shape");
      ParamInfo p;
      p.name = tok[0];
      for (std::size_t i = 1; i < tok.size(); ++i) p.shape.push_back(parse_num<std::size_t>(tok[i], lineno));
      p.count = shape_size(p.shape);
      h.params.push_back(std::move(p));
    } else if (key == "blob_bytes") {
      need(1);
      h.blob_bytes = parse_num<std::uint64_t>(tok[0], lineno);
    } else if (key == "crc32") {
      need(1);
      std::uint32_t v = 0;
      auto [p, ec] = std::from_chars(tok[0].data(), tok[0].data() + tok[0].size(), v, 16);
      if (ec != std::errc() || p != tok[0].data() + tok[0].size()) throw ParseError(lineno, "bad crc32");
      h.crc32 = v;
    } else if (key == "end") {
      ended = true;
      break;
    } else {
      throw ParseError(lineno, "unknown header key '" + key + "'");
    }
  }
  if (!have_magic) throw ParseError(lineno, "empty model file");
  if (!ended) throw ParseError(lineno, "model header is not terminated by 'end'");
  return h;
}

ModelHeader read_model_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model " + path.string());
  return read_model_header(in);
}

Model load_model(std::istream& in) {
  const ModelHeader h = read_model_header(in);
  Model m;
  try {
    m = Model(h.spec);
  } catch (const SpecError& e) {
    throw ParseError(0, std::string("model header describes an invalid network: ") + e.what());
  }
  if (m.param_info().size() != h.params.size()) throw ParseError(0, "parameter list does not match the layer stack");
  for (std::size_t i = 0; i < h.params.size(); ++i)
    if (m.param_info()[i].name != h.params[i].name || m.param_info()[i].shape != h.params[i].shape)
      throw ParseError(0, "parameter " + h.params[i].name + " does not match the layer stack");
  if (h.blob_bytes != m.parameter_count() * 4) throw ParseError(0, "blob size does not match the parameter count");

  std::vector<std::uint8_t> blob(h.blob_bytes);
  in.read(reinterpret_cast<char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
  if (static_cast<std::uint64_t>(in.gcount()) != h.blob_bytes) throw ChecksumError("weight blob is truncated");
  if (crc_of(blob) != h.crc32) throw ChecksumError("weight blob checksum mismatch");

  std::size_t off = 0;
  for (auto& t : m.params()) {
    for (float& v : t.values()) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(blob[off + static_cast<std::size_t>(b)]) << (8 * b);
      v = std::bit_cast<float>(bits);
      off += 4;
    }
  }
  m.seed = h.seed;
  m.train_config = h.train;
  return m;
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model " + path.string());
  return load_model(in);
}

}  // namespace drcnet::nn
