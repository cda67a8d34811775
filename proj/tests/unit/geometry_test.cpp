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

#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "boundary_cases.hpp"
#include "drcnet/errors.hpp"
#include "drcnet/geometry.hpp"
#include "drcnet/layout_io.hpp"
#include "drcnet/rng.hpp"
#include "oracles.hpp"

namespace drcnet {
namespace {

using testing::as_naive;
using testing::naive_drc;

std::map<Rule, std::size_t> per_rule(const DrcReport& r) {
  std::map<Rule, std::size_t> m;
  for (const Violation& v : r.violations) ++m[v.rule];
  return m;
}

TEST(RectDistance, Examples) {
  EXPECT_DOUBLE_EQ(rect_distance({0, 0, 10, 10}, {20, 0, 30, 10}), 10.0);
  EXPECT_DOUBLE_EQ(rect_distance({0, 0, 10, 10}, {13, 14, 20, 20}), 5.0);
  EXPECT_DOUBLE_EQ(rect_distance({0, 0, 10, 10}, {10, 0, 20, 10}), 0.0);
  EXPECT_DOUBLE_EQ(rect_distance({0, 0, 10, 10}, {5, 5, 20, 20}), 0.0);
  EXPECT_EQ(rect_distance_sq({0, 0, 10, 10}, {13, 14, 20, 20}), 25);
}

TEST(RectDistance, MatchesClosestPointSearch) {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    auto box = [&] {
      const Coord x = rng.uniform_int(0, 200), y = rng.uniform_int(0, 200);
      return Rect{x, y, x + rng.uniform_int(1, 80), y + rng.uniform_int(1, 80)};
    };
    const Rect a = box(), b = box();
    EXPECT_NEAR(rect_distance(a, b), testing::naive_distance(a, b), 1e-9);
    EXPECT_DOUBLE_EQ(rect_distance(a, b), rect_distance(b, a));
  }
}

TEST(CheckMinWidth, Examples) {
  const RuleSet rules;
  EXPECT_EQ(check_min_width(Layout("a", {{0, 0, 27, 100}}), rules).size(), 1u);
  EXPECT_TRUE(check_min_width(Layout("b", {{0, 0, 28, 100}}), rules).empty());
  EXPECT_TRUE(check_min_width(Layout("c", 50, 50, {}), rules).empty());
  const auto v = check_min_width(Layout("d", {{5, 5, 32, 105}}), rules);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, Rule::kWidth);
  EXPECT_EQ(v[0].region, (Rect{5, 5, 32, 105}));
  EXPECT_EQ(v[0].shape_indices, std::vector<std::size_t>{0});
}

TEST(CheckMinSpacing, Examples) {
  const RuleSet rules;
  EXPECT_EQ(check_min_spacing(Layout("a", {{0, 0, 50, 50}, {85, 0, 135, 50}}), rules).size(), 1u);
  EXPECT_TRUE(check_min_spacing(Layout("b", {{0, 0, 50, 50}, {86, 0, 136, 50}}), rules).empty());
  EXPECT_TRUE(check_min_spacing(Layout("c", {{0, 0, 50, 50}, {74, 82, 124, 132}}), rules).empty());
}

TEST(CheckEolSpacing, Examples) {
  const RuleSet rules;
  EXPECT_EQ(check_eol_spacing(Layout("a", {{0, 0, 30, 200}, {0, 244, 200, 274}}), rules).size(), 1u);
  EXPECT_TRUE(check_eol_spacing(Layout("b", {{0, 0, 30, 200}, {0, 245, 200, 275}}), rules).empty());
  const Layout wide("c", {{0, 0, 100, 200}, {0, 240, 200, 300}});
  EXPECT_TRUE(check_eol_spacing(wide, rules).empty());
  EXPECT_TRUE(check_min_spacing(wide, rules).empty());
}

TEST(RunDrc, BoundaryCases) {
  for (const auto& c : testing::boundary_cases()) {
    const DrcReport r = run_drc(testing::boundary_layout(c), RuleSet{});
    EXPECT_EQ(as_naive(r.violations), c.expected) << c.name;
    EXPECT_EQ(r.clean(), c.expected.empty()) << c.name;
    EXPECT_GE(r.duration.count(), 0.0);
  }
}

TEST(RunDrc, WidthAndSpacingGiveOnePerRule) {
  const Layout l("x", {{0, 0, 27, 100}, {200, 0, 250, 50}, {285, 0, 335, 50}});
  const DrcReport r = run_drc(l, RuleSet{});
  ASSERT_EQ(r.violations.size(), 2u);
  EXPECT_EQ(r.count(Rule::kWidth), 1u);
  EXPECT_EQ(r.count(Rule::kSpacing), 1u);
  EXPECT_EQ(r.layout_name, "x");
}

TEST(RunDrc, BoundaryCasesAgreeWithReference) {
  for (const auto& c : testing::boundary_cases())
    EXPECT_EQ(naive_drc(c.shapes, RuleSet{}), c.expected) << c.name;
}

TEST(RunDrc, MatchesAllPairsReference) {
  Rng rng(2024);
  for (int i = 0; i < 100; ++i) {
    const auto shapes = testing::random_shapes(rng, static_cast<std::size_t>(rng.uniform_int(2, 20)));
    const Layout l("r", shapes);
    EXPECT_EQ(as_naive(run_drc(l, RuleSet{}).violations), naive_drc(shapes, RuleSet{})) << "layout " << i;
  }
}

TEST(RunDrc, CanonicalOrder) {
  Rng rng(7);
  const Layout l("r", testing::random_shapes(rng, 40, 900));
  const auto v = run_drc(l, RuleSet{}).violations;
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_FALSE(violation_less(v[i], v[i - 1]));
}

TEST(RunDrc, TighterRulesNeverAddViolations) {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const Layout l("m", testing::random_shapes(rng, 20));
    RuleSet loose;
    std::size_t prev = run_drc(l, loose).violations.size();
    for (int step = 0; step < 4; ++step) {
      loose.min_width -= 4;
      loose.min_spacing -= 5;
      loose.eol_spacing -= 6;
      const std::size_t now = run_drc(l, loose).violations.size();
      EXPECT_LE(now, prev);
      prev = now;
    }
  }
}

TEST(RunDrc, TranslationMovesRegions) {
  Rng rng(12);
  for (int i = 0; i < 30; ++i) {
    const auto shapes = testing::random_shapes(rng, 15);
    std::vector<Rect> moved;
    for (const Rect& r : shapes) moved.push_back(r.translated(137, 59));
    const auto a = run_drc(Layout("a", shapes), RuleSet{}).violations;
    const auto b = run_drc(Layout("b", moved), RuleSet{}).violations;
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k].rule, b[k].rule);
      EXPECT_EQ(a[k].shape_indices, b[k].shape_indices);
      EXPECT_EQ(a[k].region.translated(137, 59), b[k].region);
    }
  }
}

TEST(RunDrc, QuarterTurnKeepsPerRuleCounts) {
  Rng rng(13);
  for (int i = 0; i < 30; ++i) {
    const Layout l("a", testing::random_shapes(rng, 15));
    std::vector<Rect> turned;
    for (const Rect& r : l.shapes()) turned.push_back({l.extent_y() - r.y1, r.x0, l.extent_y() - r.y0, r.x1});
    EXPECT_EQ(per_rule(run_drc(l, RuleSet{})), per_rule(run_drc(Layout("b", turned), RuleSet{})));
  }
}

TEST(Layout, RejectsTouchingAndDegenerateShapes) {
  EXPECT_THROW(Layout("t", {{0, 0, 10, 10}, {10, 0, 20, 10}}), InvalidLayout);
  EXPECT_THROW(Layout("o", {{0, 0, 10, 10}, {5, 5, 20, 20}}), InvalidLayout);
  EXPECT_THROW(Layout("z", {{0, 0, 0, 10}}), InvalidLayout);
  EXPECT_THROW(Layout("e", 50, 50, {{0, 0, 60, 10}}), InvalidLayout);
  const Layout ok("k", {{0, 0, 10, 10}, {11, 11, 20, 20}});
  EXPECT_EQ(ok.extent_x(), 20);
  EXPECT_EQ(ok.layer(), "M1");
}

TEST(RuleSet, Validation) {
  RuleSet r;
  EXPECT_NO_THROW(r.validate());
  r.eol_spacing = 30;
  EXPECT_THROW(r.validate(), InvalidRuleSet);
  r = RuleSet{};
  r.min_width = 0;
  EXPECT_THROW(r.validate(), InvalidRuleSet);
}

TEST(LayoutIo, RoundTrip) {
  Rng rng(5);
  const Layout l("round_trip", 700, 650, testing::random_shapes(rng, 20));
  std::stringstream buf;
  write_layout(buf, l);
  const Layout back = read_layout(buf);
  EXPECT_EQ(back.name(), l.name());
  EXPECT_EQ(back.extent_x(), 700);
  EXPECT_EQ(back.extent_y(), 650);
  ASSERT_EQ(back.size(), l.size());
  for (std::size_t i = 0; i < l.size(); ++i) EXPECT_EQ(back[i], l[i]);
}

TEST(LayoutIo, CommentsAndErrors) {
  std::istringstream good("# header\nlayout demo 100 100\nrect 0 0 10 10 # pad\n\nrect 20 0 30 10\n");
  EXPECT_EQ(read_layout(good).size(), 2u);
  std::istringstream bad("layout demo 100 100\nrect 0 0 10\n");
  try {
    read_layout(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream no_header("rect 0 0 10 10\n");
  EXPECT_THROW(read_layout(no_header), ParseError);
}

TEST(DrcReportJson, RoundTrip) {
  const DrcReport r = run_drc(Layout("x", {{0, 0, 27, 100}, {200, 0, 250, 50}, {285, 0, 335, 50}}), RuleSet{});
  const DrcReport back = parse_drc_report_json(drc_report_json(r));
  EXPECT_EQ(back.layout_name, "x");
  EXPECT_EQ(back.violations, r.violations);
  EXPECT_NE(drc_report_json(r).find("duration_ms"), std::string::npos);
}

}  // namespace
}  // namespace drcnet
