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

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace drcnet {

using Coord = std::int64_t;  // integer nanometers

// Axis-aligned closed rectangle. Layout shapes must satisfy valid(); violation
// markers may be degenerate (zero width or height) when two shapes only line
// up on an edge.
struct Rect {
  Coord x0 = 0;
  Coord y0 = 0;
  Coord x1 = 0;
  Coord y1 = 0;

  Coord width() const { return x1 - x0; }
  Coord height() const { return y1 - y0; }
  Coord short_side() const { return std::min(width(), height()); }
  bool valid() const { return x0 < x1 && y0 < y1; }

  Rect translated(Coord dx, Coord dy) const { return {x0 + dx, y0 + dy, x1 + dx, y1 + dy}; }

  friend bool operator==(const Rect&, const Rect&) = default;
  friend auto operator<=>(const Rect&, const Rect&) = default;
};

// Euclidean distance between the closest points of two closed rectangles.
// Overlapping or touching rectangles give 0.
double rect_distance(const Rect& a, const Rect& b);

// Squared distance, exact in integers.
Coord rect_distance_sq(const Rect& a, const Rect& b);

// Box spanning the gap between the closest features of two disjoint
// rectangles. On an axis where the projections overlap, the box covers the
// overlap; on a separated axis it spans the gap.
Rect gap_box(const Rect& a, const Rect& b);

struct RuleSet {
  Coord min_width = 28;          // M1.1
  Coord min_spacing = 36;        // M1.6
  Coord eol_spacing = 45;        // M1.7
  Coord eol_end_max_width = 40;  // widest edge still treated as a line end

  // Throws InvalidRuleSet unless all values are positive and
  // eol_spacing >= min_spacing.
  void validate() const;

  friend bool operator==(const RuleSet&, const RuleSet&) = default;
};

enum class Rule : std::uint8_t { kWidth = 0, kSpacing = 1, kEol = 2 };

inline constexpr Rule kAllRules[] = {Rule::kWidth, Rule::kSpacing, Rule::kEol};

// Bit used for a rule in label and mask bitmasks: M1.1 -> 1, M1.6 -> 2, M1.7 -> 4.
constexpr unsigned rule_bit(Rule r) { return 1u << static_cast<unsigned>(r); }

std::string_view rule_name(Rule r);  // "M1.1", "M1.6", "M1.7"
Rule parse_rule(std::string_view name);

struct Violation {
  Rule rule = Rule::kWidth;
  Rect region;
  std::vector<std::size_t> shape_indices;  // ascending

  friend bool operator==(const Violation&, const Violation&) = default;
};

// Canonical ordering: rule, then lowest shape index, then remaining indices,
// then region.
bool violation_less(const Violation& a, const Violation& b);

// Named set of disjoint rectangles on M1. Construction validates that every
// shape has positive size, lies inside [0, extent], and is separated from
// every other shape by a strictly positive gap.
class Layout {
 public:
  Layout() = default;
  Layout(std::string name, Coord extent_x, Coord extent_y, std::vector<Rect> shapes);
  // Extent derived from the shapes (max x1, max y1).
  Layout(std::string name, std::vector<Rect> shapes);

  const std::string& name() const { return name_; }
  std::string_view layer() const { return "M1"; }
  Coord extent_x() const { return extent_x_; }
  Coord extent_y() const { return extent_y_; }
  std::span<const Rect> shapes() const { return shapes_; }
  std::size_t size() const { return shapes_.size(); }
  const Rect& operator[](std::size_t i) const { return shapes_[i]; }

 private:
  std::string name_;
  Coord extent_x_ = 0;
  Coord extent_y_ = 0;
  std::vector<Rect> shapes_;
};

// Returns the index pair of the first two shapes that overlap or touch, or
// {-1,-1} when all shapes are separated. Uses the grid index.
std::pair<long, long> find_touching_pair(std::span<const Rect> shapes);

struct DrcReport {
  std::string layout_name;
  std::vector<Violation> violations;
  std::chrono::duration<double, std::milli> duration{0};

  bool clean() const { return violations.empty(); }
  std::size_t count(Rule r) const;
};

std::vector<Violation> check_min_width(const Layout& layout, const RuleSet& rules);
std::vector<Violation> check_min_spacing(const Layout& layout, const RuleSet& rules);
std::vector<Violation> check_eol_spacing(const Layout& layout, const RuleSet& rules);

// All three checks, canonically ordered, timed.
DrcReport run_drc(const Layout& layout, const RuleSet& rules);

// Pairwise rule evaluation shared by the checker and by generators that need
// to test a candidate shape against its neighbours. Shapes must be disjoint.
struct PairFindings {
  bool spacing = false;
  Rect spacing_region;
  bool eol = false;
  Rect eol_region;
};
PairFindings evaluate_pair(const Rect& a, const Rect& b, const RuleSet& rules);

}  // namespace drcnet
