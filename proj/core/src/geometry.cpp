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

#include "drcnet/geometry.hpp"

#include <cmath>
#include <optional>

#include "drcnet/errors.hpp"
#include "drcnet/spatial_grid.hpp"

namespace drcnet {
namespace {

// Signed separation of two closed intervals: > 0 gap, 0 touching, < 0 overlap.
Coord separation(Coord a0, Coord a1, Coord b0, Coord b1) { return std::max(a0 - b1, b0 - a1); }

// Closed span between the facing ends of two intervals (the overlap when they
// overlap, the gap otherwise).
std::pair<Coord, Coord> facing_span(Coord a0, Coord a1, Coord b0, Coord b1) {
  if (a1 <= b0) return {a1, b0};
  if (b1 <= a0) return {b1, a0};
  return {std::max(a0, b0), std::min(a1, b1)};
}

// If a line-end cap of `r` faces `s` closer than the EOL limit, the marker
// spanning the cap overlap and the gap.
std::optional<Rect> cap_facing(const Rect& r, const Rect& s, const RuleSet& rules) {
  if (r.short_side() > rules.eol_end_max_width) return std::nullopt;
  // Caps are the edges whose length equals the short side.
  if (r.width() <= r.height()) {
    const Coord lo = std::max(r.x0, s.x0);
    const Coord hi = std::min(r.x1, s.x1);
    if (lo < hi) {
      Coord d = 0;
      Rect region;
      if (s.y0 >= r.y1) {
        d = s.y0 - r.y1;
        region = {lo, r.y1, hi, s.y0};
      } else if (s.y1 <= r.y0) {
        d = r.y0 - s.y1;
        region = {lo, s.y1, hi, r.y0};
      }
      if (d > 0 && d < rules.eol_spacing) return region;
    }
  }
  if (r.height() <= r.width()) {
    const Coord lo = std::max(r.y0, s.y0);
    const Coord hi = std::min(r.y1, s.y1);
    if (lo < hi) {
      Coord d = 0;
      Rect region;
      if (s.x0 >= r.x1) {
        d = s.x0 - r.x1;
        region = {r.x1, lo, s.x0, hi};
      } else if (s.x1 <= r.x0) {
        d = r.x0 - s.x1;
        region = {s.x1, lo, r.x0, hi};
      }
      if (d > 0 && d < rules.eol_spacing) return region;
    }
  }
  return std::nullopt;
}

enum class PairChecks { kSpacing, kEol, kBoth };

std::vector<Violation> scan_pairs(const Layout& layout, const RuleSet& rules, PairChecks which) {
  std::vector<Violation> out;
  if (layout.size() < 2) return out;
  const Coord reach = std::max(rules.min_spacing, rules.eol_spacing);
  SpatialGrid grid(layout.extent_x(), layout.extent_y(), rules.eol_spacing);
  for (std::size_t i = 0; i < layout.size(); ++i) grid.insert(static_cast<std::uint32_t>(i), layout[i]);

  for (std::size_t i = 0; i < layout.size(); ++i) {
    for (std::uint32_t j : grid.query(layout[i], reach)) {
      if (j <= i) continue;
      const PairFindings f = evaluate_pair(layout[i], layout[j], rules);
      if (f.spacing && which != PairChecks::kEol)
        out.push_back({Rule::kSpacing, f.spacing_region, {i, j}});
      if (f.eol && which != PairChecks::kSpacing) out.push_back({Rule::kEol, f.eol_region, {i, j}});
    }
  }
  return out;
}

void sort_violations(std::vector<Violation>& v) { std::sort(v.begin(), v.end(), violation_less); }

}  // namespace

Coord rect_distance_sq(const Rect& a, const Rect& b) {
  const Coord dx = std::max<Coord>(0, separation(a.x0, a.x1, b.x0, b.x1));
  const Coord dy = std::max<Coord>(0, separation(a.y0, a.y1, b.y0, b.y1));
  return dx * dx + dy * dy;
}

double rect_distance(const Rect& a, const Rect& b) {
  return std::sqrt(static_cast<double>(rect_distance_sq(a, b)));
}

Rect gap_box(const Rect& a, const Rect& b) {
  const auto [x0, x1] = facing_span(a.x0, a.x1, b.x0, b.x1);
  const auto [y0, y1] = facing_span(a.y0, a.y1, b.y0, b.y1);
  return {x0, y0, x1, y1};
}

void RuleSet::validate() const {
  if (min_width <= 0 || min_spacing <= 0 || eol_spacing <= 0 || eol_end_max_width <= 0)
    throw InvalidRuleSet("all rule values must be positive");
  if (eol_spacing < min_spacing) throw InvalidRuleSet("eol_spacing must be >= min_spacing");
}

std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::kWidth:
      return "M1.1";
    case Rule::kSpacing:
      return "M1.6";
    case Rule::kEol:
      return "M1.7";
  }
  return "?";
}

Rule parse_rule(std::string_view name) {
  for (Rule r : kAllRules)
    if (rule_name(r) == name) return r;
  throw DataError("unknown rule '" + std::string(name) + "'");
}

bool violation_less(const Violation& a, const Violation& b) {
  if (a.rule != b.rule) return a.rule < b.rule;
  if (a.shape_indices != b.shape_indices) return a.shape_indices < b.shape_indices;
  return a.region < b.region;
}

Layout::Layout(std::string name, Coord extent_x, Coord extent_y, std::vector<Rect> shapes)
    : name_(std::move(name)), extent_x_(extent_x), extent_y_(extent_y), shapes_(std::move(shapes)) {
  if (extent_x_ < 0 || extent_y_ < 0) throw InvalidLayout("negative extent");
  for (std::size_t i = 0; i < shapes_.size(); ++i) {
    const Rect& r = shapes_[i];
    if (!r.valid()) throw InvalidLayout("shape " + std::to_string(i) + " has non-positive size");
    if (r.x0 < 0 || r.y0 < 0 || r.x1 > extent_x_ || r.y1 > extent_y_)
      throw InvalidLayout("shape " + std::to_string(i) + " lies outside the layout extent");
  }
  const auto [a, b] = find_touching_pair(shapes_);
  if (a >= 0)
    throw InvalidLayout("shapes " + std::to_string(a) + " and " + std::to_string(b) +
                        " overlap or abut");
}

namespace {
std::pair<Coord, Coord> max_corner(std::span<const Rect> shapes) {
  Coord x = 0, y = 0;
  for (const Rect& r : shapes) {
    x = std::max(x, r.x1);
    y = std::max(y, r.y1);
  }
  return {x, y};
}
}  // namespace

Layout::Layout(std::string name, std::vector<Rect> shapes) : name_(std::move(name)) {
  const auto [ex, ey] = max_corner(shapes);
  *this = Layout(std::move(name_), ex, ey, std::move(shapes));
}

std::pair<long, long> find_touching_pair(std::span<const Rect> shapes) {
  if (shapes.size() < 2) return {-1, -1};
  auto [ex, ey] = max_corner(shapes);
  SpatialGrid grid(ex, ey, 64);
  for (std::size_t i = 0; i < shapes.size(); ++i) grid.insert(static_cast<std::uint32_t>(i), shapes[i]);
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    for (std::uint32_t j : grid.query(shapes[i], 1)) {
      if (j <= i) continue;
      if (rect_distance_sq(shapes[i], shapes[j]) == 0)
        return {static_cast<long>(i), static_cast<long>(j)};
    }
  }
  return {-1, -1};
}

std::size_t DrcReport::count(Rule r) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [r](const Violation& v) { return v.rule == r; }));
}

PairFindings evaluate_pair(const Rect& a, const Rect& b, const RuleSet& rules) {
  PairFindings f;
  const Coord d2 = rect_distance_sq(a, b);
  if (d2 > 0 && d2 < rules.min_spacing * rules.min_spacing) {
    f.spacing = true;
    f.spacing_region = gap_box(a, b);
  }
  if (auto region = cap_facing(a, b, rules)) {
    f.eol = true;
    f.eol_region = *region;
  } else if (auto other = cap_facing(b, a, rules)) {
    f.eol = true;
    f.eol_region = *other;
  }
  return f;
}

std::vector<Violation> check_min_width(const Layout& layout, const RuleSet& rules) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (layout[i].short_side() < rules.min_width) out.push_back({Rule::kWidth, layout[i], {i}});
  }
  return out;
}

std::vector<Violation> check_min_spacing(const Layout& layout, const RuleSet& rules) {
  auto v = scan_pairs(layout, rules, PairChecks::kSpacing);
  sort_violations(v);
  return v;
}

std::vector<Violation> check_eol_spacing(const Layout& layout, const RuleSet& rules) {
  auto v = scan_pairs(layout, rules, PairChecks::kEol);
  sort_violations(v);
  return v;
}

DrcReport run_drc(const Layout& layout, const RuleSet& rules) {
  const auto start = std::chrono::steady_clock::now();
  DrcReport report;
  report.layout_name = layout.name();
  report.violations = check_min_width(layout, rules);
  auto pairs = scan_pairs(layout, rules, PairChecks::kBoth);
  report.violations.insert(report.violations.end(), std::make_move_iterator(pairs.begin()),
                           std::make_move_iterator(pairs.end()));
  sort_violations(report.violations);
  report.duration = std::chrono::steady_clock::now() - start;
  return report;
}

}  // namespace drcnet
