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

#include "drcnet/layout_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "drcnet/errors.hpp"

namespace drcnet {
namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line.substr(0, line.find('#')));
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

Coord to_coord(const std::string& tok, std::size_t line) {
  Coord v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError(line, "expected integer, got '" + tok + "'");
  return v;
}

}  // namespace

Layout read_layout(std::istream& in) {
  std::string name;
  Coord ex = 0, ey = 0;
  bool have_header = false;
  std::vector<Rect> shapes;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    const auto tok = tokenize(line);
    if (tok.empty()) continue;
    if (tok[0] == "layout") {
      if (have_header) throw ParseError(lineno, "duplicate layout header");
      if (tok.size() != 4) throw ParseError(lineno, "expected 'layout <name> <extent_x> <extent_y>'");
      name = tok[1];
      ex = to_coord(tok[2], lineno);
      ey = to_coord(tok[3], lineno);
      have_header = true;
    } else if (tok[0] == "rect") {
      if (!have_header) throw ParseError(lineno, "rect before layout header");
      if (tok.size() != 5) throw ParseError(lineno, "expected 'rect <x0> <y0> <x1> <y1>'");
      Rect r{to_coord(tok[1], lineno), to_coord(tok[2], lineno), to_coord(tok[3], lineno),
             to_coord(tok[4], lineno)};
      if (!r.valid()) throw ParseError(lineno, "rectangle must have x0 < x1 and y0 < y1");
      shapes.push_back(r);
    } else {
      throw ParseError(lineno, "unknown record '" + tok[0] + "'");
    }
  }
  if (!have_header) throw ParseError(lineno, "missing layout header");
  return Layout(name, ex, ey, std::move(shapes));
}

Layout read_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open layout " + path.string());
  return read_layout(in);
}

void write_layout(std::ostream& out, const Layout& layout) {
  out << "layout " << layout.name() << ' ' << layout.extent_x() << ' ' << layout.extent_y() << '\n';
  for (const Rect& r : layout.shapes()) out << "rect " << r.x0 << ' ' << r.y0 << ' ' << r.x1 << ' ' << r.y1 << '\n';
}

void write_layout(const std::filesystem::path& path, const Layout& layout) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write layout " + path.string());
  write_layout(out, layout);
}

std::string drc_report_json(const DrcReport& report) {
  nlohmann::ordered_json doc;
  doc["layout"] = report.layout_name;
  doc["duration_ms"] = report.duration.count();
  auto& list = doc["violations"] = nlohmann::ordered_json::array();
  for (const Violation& v : report.violations) {
    nlohmann::ordered_json item;
    item["rule"] = rule_name(v.rule);
    item["x0"] = v.region.x0;
    item["y0"] = v.region.y0;
    item["x1"] = v.region.x1;
    item["y1"] = v.region.y1;
    item["shape_indices"] = v.shape_indices;
    list.push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

DrcReport parse_drc_report_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    DrcReport report;
    report.layout_name = doc.at("layout").get<std::string>();
    report.duration = std::chrono::duration<double, std::milli>(doc.at("duration_ms").get<double>());
    for (const auto& item : doc.at("violations")) {
      Violation v;
      v.rule = parse_rule(item.at("rule").get<std::string>());
      v.region = {item.at("x0").get<Coord>(), item.at("y0").get<Coord>(), item.at("x1").get<Coord>(),
                  item.at("y1").get<Coord>()};
      v.shape_indices = item.at("shape_indices").get<std::vector<std::size_t>>();
      report.violations.push_back(std::move(v));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed DRC report: ") + e.what());
  }
}

}  // namespace drcnet
