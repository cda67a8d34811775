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

#include "drcnet/manifest.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "drcnet/errors.hpp"

namespace drcnet {
namespace {

constexpr std::string_view kMagic = "# drcnet manifest v";
constexpr std::string_view kColumns = "path,label,origin_x,origin_y,source,split";

template <typename T>
T parse_number(std::string_view tok, std::size_t line, std::string_view what) {
  T v{};
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError(line, "bad " + std::string(what) + " '" + std::string(tok) + "'");
  return v;
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string counts_line(const DatasetManifest& m) {
  std::string s;
  for (const auto& [label, n] : m.counts()) {
    if (!s.empty()) s += ' ';
    s += std::string(label_name(label)) + "=" + std::to_string(n);
  }
  return s;
}

}  // namespace

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "?";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  throw DataError("unknown split '" + std::string(s) + "'");
}

std::map<ClipLabel, std::size_t> DatasetManifest::counts() const {
  std::map<ClipLabel, std::size_t> out;
  for (ClipLabel l : class_labels(label_space)) out[l] = 0;
  for (const auto& e : entries) ++out[e.label];
  return out;
}

std::size_t DatasetManifest::count(Split s) const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.split == s;
  return n;
}

void write_manifest(std::ostream& out, const DatasetManifest& m) {
  out << kMagic << DatasetManifest::kFormatVersion << '\n';
  out << "# seed " << m.seed << '\n';
  out << "# label_space " << static_cast<int>(m.label_space) << '\n';
  out << "# rules min_width=" << m.rules.min_width << " min_spacing=" << m.rules.min_spacing
      << " eol_spacing=" << m.rules.eol_spacing << " eol_end_max_width=" << m.rules.eol_end_max_width << '\n';
  for (const auto& [k, v] : m.config) out << "# config " << k << '=' << v << '\n';
  out << "# counts " << counts_line(m) << '\n';
  out << "# entries " << m.entries.size() << '\n';
  out << kColumns << '\n';
  for (const auto& e : m.entries) {
    out << e.path << ',' << label_name(e.label) << ',' << e.origin.x << ',' << e.origin.y << ',' << e.source << ','
        << split_name(e.split) << '\n';
  }
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest " + path.string());
  write_manifest(out, manifest);
}

DatasetManifest read_manifest(std::istream& in) {
  DatasetManifest m;
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || !line.starts_with(kMagic)) throw ParseError(lineno, "missing manifest magic line");
  const int version = parse_number<int>(std::string_view(line).substr(kMagic.size()), lineno, "version");
  if (version != DatasetManifest::kFormatVersion)
    throw ParseError(lineno, "unsupported manifest version " + std::to_string(version));

  std::size_t declared = 0;
  bool have_entries = false;
  std::string declared_counts;
  for (;;) {
    if (!next_line()) throw ParseError(lineno, "unexpected end of header");
    if (line == kColumns) break;
    if (!line.starts_with("# ")) throw ParseError(lineno, "expected header line");
    std::string_view body = std::string_view(line).substr(2);
    const auto sp = body.find(' ');
    const std::string_view key = body.substr(0, sp);
    const std::string_view value = sp == std::string_view::npos ? std::string_view{} : body.substr(sp + 1);
    if (key == "seed") {
      m.seed = parse_number<std::uint64_t>(value, lineno, "seed");
    } else if (key == "label_space") {
      const int space = parse_number<int>(value, lineno, "label space");
      if (space != 1 && space != 3) throw ParseError(lineno, "label space must be 1 or 3");
      m.label_space = static_cast<LabelSpace>(space);
    } else if (key == "rules") {
      for (std::string_view kv : split_on(value, ' ')) {
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos) throw ParseError(lineno, "bad rule field");
        const auto k = kv.substr(0, eq);
        const auto v = parse_number<Coord>(kv.substr(eq + 1), lineno, "rule value");
        if (k == "min_width") m.rules.min_width = v;
        else if (k == "min_spacing") m.rules.min_spacing = v;
        else if (k == "eol_spacing") m.rules.eol_spacing = v;
        else if (k == "eol_end_max_width") m.rules.eol_end_max_width = v;
        else throw ParseError(lineno, "unknown rule field");
      }
    } else if (key == "config") {
      const auto eq = value.find('=');
      if (eq == std::string_view::npos) throw ParseError(lineno, "config line needs key=value");
      m.config.emplace_back(std::string(value.substr(0, eq)), std::string(value.substr(eq + 1)));
    } else if (key == "counts") {
      declared_counts = std::string(value);
    } else if (key == "entries") {
      declared = parse_number<std::size_t>(value, lineno, "entry count");
      have_entries = true;
    } else {
      throw ParseError(lineno, "unknown header key '" + std::string(key) + "'");
    }
  }
  if (!have_entries) throw ParseError(lineno, "header lacks entry count");

  m.entries.reserve(declared);
  while (next_line()) {
    if (line.empty()) continue;
    const auto f = split_on(line, ',');
    if (f.size() != 6) throw ParseError(lineno, "expected 6 fields");
    ManifestEntry e;
    e.path = std::string(f[0]);
    try {
      e.label = parse_label(f[1]);
      class_index(m.label_space, e.label);
      e.split = parse_split(f[5]);
    } catch (const Error& err) {
      throw ParseError(lineno, err.what());
    }
    e.origin = {parse_number<Coord>(f[2], lineno, "origin_x"), parse_number<Coord>(f[3], lineno, "origin_y")};
    e.source = std::string(f[4]);
    if (e.path.empty() || e.source.empty()) throw ParseError(lineno, "empty path or source");
    m.entries.push_back(std::move(e));
  }
  if (m.entries.size() != declared)
    throw ParseError(lineno, "manifest declares " + std::to_string(declared) + " entries but holds " +
                                 std::to_string(m.entries.size()));
  if (!declared_counts.empty() && declared_counts != counts_line(m))
    throw ParseError(lineno, "label counts do not match header");
  return m;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest " + path.string());
  return read_manifest(in);
}

}  // namespace drcnet
