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

#include <filesystem>
#include <iosfwd>
#include <string>

#include "drcnet/geometry.hpp"

namespace drcnet {

// Layout interchange text:
//   layout <name> <extent_x> <extent_y>
//   rect <x0> <y0> <x1> <y1>
// '#' starts a comment. Throws ParseError with the offending line number.
Layout read_layout(std::istream& in);
Layout read_layout(const std::filesystem::path& path);
void write_layout(std::ostream& out, const Layout& layout);
void write_layout(const std::filesystem::path& path, const Layout& layout);

// DRC report as JSON: {"layout", "duration_ms", "violations": [{"rule", "x0",
// "y0", "x1", "y1", "shape_indices"}]}.
std::string drc_report_json(const DrcReport& report);
DrcReport parse_drc_report_json(const std::string& text);

}  // namespace drcnet
