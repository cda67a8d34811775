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

// Hand-built layouts at the rule limits, each with its expected violations
// worked out by hand.
#pragma once

#include <string>
#include <vector>

#include "oracles.hpp"

namespace drcnet::testing {

struct BoundaryCase {
  std::string name;
  std::vector<Rect> shapes;
  std::vector<NaiveViolation> expected;  // canonical order
};

inline std::vector<BoundaryCase> boundary_cases() {
  constexpr Rule W = Rule::kWidth, S = Rule::kSpacing, E = Rule::kEol;
  return {
      {"width_27", {{0, 0, 27, 100}}, {{W, {0}, {0, 0, 27, 100}}}},
      {"width_28", {{0, 0, 28, 100}}, {}},
      {"width_27_horizontal", {{0, 0, 100, 27}}, {{W, {0}, {0, 0, 100, 27}}}},
      {"spacing_35", {{0, 0, 50, 50}, {85, 0, 135, 50}}, {{S, {0, 1}, {50, 0, 85, 50}}}},
      {"spacing_36", {{0, 0, 50, 50}, {86, 0, 136, 50}}, {}},
      {"spacing_35_vertical", {{0, 0, 50, 50}, {0, 85, 50, 135}}, {{S, {0, 1}, {0, 50, 50, 85}}}},
      {"diagonal_40", {{0, 0, 50, 50}, {74, 82, 124, 132}}, {}},
      {"diagonal_35", {{0, 0, 50, 50}, {71, 78, 121, 128}}, {{S, {0, 1}, {50, 50, 71, 78}}}},
      {"diagonal_30", {{0, 0, 50, 50}, {68, 74, 118, 124}}, {{S, {0, 1}, {50, 50, 68, 74}}}},
      // Corner-to-corner 45 sits below the EOL limit but a diagonal neighbour
      // never overlaps a cap's span.
      {"diagonal_45_wire", {{0, 0, 30, 200}, {57, 236, 257, 266}}, {}},
      {"eol_44", {{0, 0, 30, 200}, {0, 244, 200, 274}}, {{E, {0, 1}, {0, 200, 30, 244}}}},
      {"eol_45", {{0, 0, 30, 200}, {0, 245, 200, 275}}, {}},
      {"eol_only_40", {{0, 0, 30, 200}, {0, 240, 200, 270}}, {{E, {0, 1}, {0, 200, 30, 240}}}},
      {"eol_only_36", {{0, 0, 30, 200}, {0, 236, 200, 266}}, {{E, {0, 1}, {0, 200, 30, 236}}}},
      {"eol_and_spacing_35",
       {{0, 0, 30, 200}, {0, 235, 200, 265}},
       {{S, {0, 1}, {0, 200, 30, 235}}, {E, {0, 1}, {0, 200, 30, 235}}}},
      {"wide_end_no_eol", {{0, 0, 100, 200}, {0, 240, 200, 300}}, {}},
      {"cap_width_40", {{0, 0, 40, 200}, {0, 244, 200, 274}}, {{E, {0, 1}, {0, 200, 40, 244}}}},
      {"cap_width_41", {{0, 0, 41, 200}, {0, 240, 200, 300}}, {}},
      {"eol_partial_overlap", {{0, 0, 30, 200}, {20, 240, 220, 270}}, {{E, {0, 1}, {20, 200, 30, 240}}}},
      {"eol_zero_overlap", {{0, 0, 30, 200}, {30, 240, 230, 270}}, {}},
      {"eol_right_cap", {{0, 100, 200, 130}, {242, 0, 272, 300}}, {{E, {0, 1}, {200, 100, 242, 130}}}},
      {"eol_left_cap", {{0, 0, 30, 300}, {72, 100, 272, 130}}, {{E, {0, 1}, {30, 100, 72, 130}}}},
      {"eol_mutual_ends", {{0, 0, 30, 200}, {0, 240, 30, 440}}, {{E, {0, 1}, {0, 200, 30, 240}}}},
      {"eol_square_pads", {{0, 0, 30, 30}, {0, 70, 30, 100}}, {{E, {0, 1}, {0, 30, 30, 70}}}},
      {"parallel_40", {{0, 0, 30, 200}, {70, 0, 100, 200}}, {}},
      {"parallel_35", {{0, 0, 30, 200}, {65, 0, 95, 200}}, {{S, {0, 1}, {30, 0, 65, 200}}}},
      {"width_and_spacing",
       {{0, 0, 27, 100}, {200, 0, 250, 50}, {285, 0, 335, 50}},
       {{W, {0}, {0, 0, 27, 100}}, {S, {1, 2}, {250, 0, 285, 50}}}},
      {"injected_eol_40",
       {{0, 0, 30, 200}, {0, 240, 200, 270}, {400, 0, 450, 400}},
       {{E, {0, 1}, {0, 200, 30, 240}}}},
      {"empty", {}, {}},
  };
}

inline Layout boundary_layout(const BoundaryCase& c) {
  return c.shapes.empty() ? Layout(c.name, 100, 100, {}) : Layout(c.name, c.shapes);
}

}  // namespace drcnet::testing
