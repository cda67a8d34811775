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

#include "drcnet/forge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "drcnet/errors.hpp"
#include "drcnet/parallel.hpp"
#include "drcnet/spatial_grid.hpp"

namespace drcnet {
namespace {

bool inside(const Rect& r, Coord ex, Coord ey) { return r.x0 >= 0 && r.y0 >= 0 && r.x1 <= ex && r.y1 <= ey; }

// Twice the centre, to stay in integers.
std::pair<Coord, Coord> centre2(const Rect& r) { return {r.x0 + r.x1, r.y0 + r.y1}; }

// Mutable shape set with a grid index, shared by seed synthesis and injection.
class ShapeBoard {
 public:
  ShapeBoard(Coord ex, Coord ey, const RuleSet& rules, std::vector<Rect> shapes = {})
      : ex_(ex), ey_(ey), rules_(rules), grid_(ex, ey, 64), shapes_(std::move(shapes)) {
    for (std::size_t i = 0; i < shapes_.size(); ++i) grid_.insert(static_cast<std::uint32_t>(i), shapes_[i]);
  }

  const std::vector<Rect>& shapes() const { return shapes_; }
  const Rect& operator[](std::size_t i) const { return shapes_[i]; }
  std::size_t size() const { return shapes_.size(); }

  std::vector<std::uint32_t> near(const Rect& r, Coord margin) const { return grid_.query(r, margin); }

  // Rule bitmask of violations that `r` would have against every shape other
  // than `skip`, or nullopt if it would leave the extent or touch a shape.
  std::optional<unsigned> rules_against(const Rect& r, std::size_t skip) const {
    if (!r.valid() || !inside(r, ex_, ey_)) return std::nullopt;
    unsigned mask = r.short_side() < rules_.min_width ? rule_bit(Rule::kWidth) : 0u;
    for (std::uint32_t j : grid_.query(r, reach())) {
      if (j == skip) continue;
      if (rect_distance_sq(r, shapes_[j]) == 0) return std::nullopt;
      const PairFindings f = evaluate_pair(r, shapes_[j], rules_);
      if (f.spacing) mask |= rule_bit(Rule::kSpacing);
      if (f.eol) mask |= rule_bit(Rule::kEol);
    }
    return mask;
  }

  // Adds `r` if it is rule-clean and at least `clearance` from every shape.
  bool add_if_clean(const Rect& r, Coord clearance = 0) {
    const auto mask = rules_against(r, SIZE_MAX);
    if (!mask || *mask != 0) return false;
    for (std::uint32_t j : grid_.query(r, clearance))
      if (rect_distance_sq(r, shapes_[j]) < clearance * clearance) return false;
    grid_.insert(static_cast<std::uint32_t>(shapes_.size()), r);
    shapes_.push_back(r);
    return true;
  }

  void replace(std::size_t i, const Rect& r) {
    grid_.erase(static_cast<std::uint32_t>(i), shapes_[i]);
    shapes_[i] = r;
    grid_.insert(static_cast<std::uint32_t>(i), r);
  }

 private:
  Coord reach() const { return std::max(rules_.min_spacing, rules_.eol_spacing); }

  Coord ex_, ey_;
  RuleSet rules_;
  SpatialGrid grid_;
  std::vector<Rect> shapes_;
};

void check_seed_config(const SeedConfig& c) {
  c.rules.validate();
  if (c.extent_x <= 0 || c.extent_y <= 0) throw GenerationFailed("extent must be positive");
  if (c.min_wires < 0 || c.max_wires < c.min_wires) throw GenerationFailed("bad wire count range");
  if (c.width_min <= 0 || c.width_max < c.width_min || c.spacing_min <= 0 || c.spacing_max < c.spacing_min ||
      c.end_gap_min <= 0 || c.end_gap_max < c.end_gap_min || c.segment_min <= 0 ||
      c.segment_max < c.segment_min || c.tile <= 0 || c.clearance < 0)
    throw GenerationFailed("bad seed size ranges");
}

}  // namespace

std::string_view operator_name(Operator op) {
  switch (op) {
    case Operator::kShrinkWidth:
      return "SHRINK_WIDTH";
    case Operator::kPullCloser:
      return "PULL_CLOSER";
    case Operator::kEolPush:
      return "EOL_PUSH";
  }
  return "?";
}

Layout synth_seed(const SeedConfig& cfg, Rng& rng, std::string name) {
  check_seed_config(cfg);
  const auto target = static_cast<std::size_t>(rng.uniform_int(cfg.min_wires, cfg.max_wires));
  ShapeBoard board(cfg.extent_x, cfg.extent_y, cfg.rules);

  const Coord tiles_x = (cfg.extent_x + cfg.tile - 1) / cfg.tile;
  const Coord tiles_y = (cfg.extent_y + cfg.tile - 1) / cfg.tile;
  for (Coord ty = 0; ty < tiles_y && board.size() < target; ++ty) {
    for (Coord tx = 0; tx < tiles_x && board.size() < target; ++tx) {
      const bool horizontal = rng.coin();
      const Coord tx0 = tx * cfg.tile, tx1 = std::min(cfg.extent_x, tx0 + cfg.tile);
      const Coord ty0 = ty * cfg.tile, ty1 = std::min(cfg.extent_y, ty0 + cfg.tile);
      // "along" runs with the tracks, "across" steps from track to track.
      const Coord along0 = horizontal ? tx0 : ty0, along1 = horizontal ? tx1 : ty1;
      const Coord across0 = horizontal ? ty0 : tx0, across1 = horizontal ? ty1 : tx1;

      Coord pos = across0 + rng.uniform_int(0, cfg.spacing_max / 2);
      while (board.size() < target) {
        const Coord w = rng.uniform_int(cfg.width_min, cfg.width_max);
        if (pos + w > across1) break;
        Coord a = along0 + rng.uniform_int(0, cfg.end_gap_max / 2);
        while (a < along1 && board.size() < target) {
          const Coord len = rng.uniform_int(cfg.segment_min, cfg.segment_max);
          const Coord end = std::min(a + len, along1);
          if (end - a > w) {
            const Rect r = horizontal ? Rect{a, pos, end, pos + w} : Rect{pos, a, pos + w, end};
            board.add_if_clean(r, cfg.clearance);
          }
          a = end + rng.uniform_int(cfg.end_gap_min, cfg.end_gap_max);
        }
        pos += w + rng.uniform_int(cfg.spacing_min, cfg.spacing_max);
      }
    }
  }

  for (int k = 0; k < cfg.stubs && board.size() < target; ++k) {
    const Coord w = rng.uniform_int(cfg.width_min, cfg.width_max);
    const Coord len = rng.uniform_int(w + 10, 2 * w + 40);
    const bool horizontal = rng.coin();
    const Coord sx = horizontal ? len : w, sy = horizontal ? w : len;
    if (sx > cfg.extent_x || sy > cfg.extent_y) continue;
    const Coord x = rng.uniform_int(0, cfg.extent_x - sx);
    const Coord y = rng.uniform_int(0, cfg.extent_y - sy);
    board.add_if_clean({x, y, x + sx, y + sy}, cfg.clearance);
  }

  if (board.size() < static_cast<std::size_t>(cfg.min_wires))
    throw GenerationFailed("placed " + std::to_string(board.size()) + " shapes, need at least " +
                           std::to_string(cfg.min_wires));
  Layout layout(std::move(name), cfg.extent_x, cfg.extent_y, board.shapes());
  if (!run_drc(layout, cfg.rules).clean()) throw GenerationFailed("synthesized layout failed certification");
  return layout;
}

namespace {

struct Facing {
  std::uint32_t other;
  Coord gap;
  int axis;  // 0: gap along x, 1: gap along y
  int dir;   // +1: other lies on the high side of the shape
};

// Shapes whose projection overlaps `s` on one axis and which lie beyond it on
// the other axis.
std::vector<Facing> facing_shapes(const ShapeBoard& board, std::size_t s, Coord margin) {
  std::vector<Facing> out;
  const Rect& r = board[s];
  for (std::uint32_t j : board.near(r, margin)) {
    if (j == s) continue;
    const Rect& o = board[j];
    if (std::max(r.y0, o.y0) < std::min(r.y1, o.y1)) {
      if (o.x0 >= r.x1) out.push_back({j, o.x0 - r.x1, 0, +1});
      else if (o.x1 <= r.x0) out.push_back({j, r.x0 - o.x1, 0, -1});
    } else if (std::max(r.x0, o.x0) < std::min(r.x1, o.x1)) {
      if (o.y0 >= r.y1) out.push_back({j, o.y0 - r.y1, 1, +1});
      else if (o.y1 <= r.y0) out.push_back({j, r.y0 - o.y1, 1, -1});
    }
  }
  return out;
}

// One proposal for `op` on shape s, or nullopt when s does not admit it.
std::optional<std::pair<Rect, Coord>> propose(Operator op, const ShapeBoard& board, std::size_t s, Rng& rng,
                                              const InjectConfig& cfg) {
  const Rect& r = board[s];
  switch (op) {
    case Operator::kShrinkWidth: {
      const Coord target = rng.uniform_int(cfg.shrink_min, cfg.shrink_max);
      if (r.short_side() <= target) return std::nullopt;
      Rect out = r;
      if (r.width() <= r.height()) {
        out.x0 = r.x0 + (r.width() - target) / 2;
        out.x1 = out.x0 + target;
      } else {
        out.y0 = r.y0 + (r.height() - target) / 2;
        out.y1 = out.y0 + target;
      }
      return std::pair{out, target};
    }
    case Operator::kPullCloser: {
      const auto facing = facing_shapes(board, s, 160);
      if (facing.empty()) return std::nullopt;
      const Facing f = facing[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(facing.size()) - 1))];
      const Coord target = rng.uniform_int(cfg.pull_min, cfg.pull_max);
      if (f.gap <= target) return std::nullopt;
      const Coord shift = (f.gap - target) * f.dir;
      return std::pair{f.axis == 0 ? r.translated(shift, 0) : r.translated(0, shift), target};
    }
    case Operator::kEolPush: {
      if (r.short_side() > cfg.rules.eol_end_max_width) return std::nullopt;
      // Caps sit across the long axis; a square has caps on both axes.
      std::vector<Facing> caps;
      for (const Facing& f : facing_shapes(board, s, 260)) {
        const bool cap_axis = f.axis == 0 ? r.height() <= r.width() : r.width() <= r.height();
        if (!cap_axis) continue;
        // Only the nearest shape in each direction can be approached.
        auto same = std::find_if(caps.begin(), caps.end(),
                                 [&](const Facing& c) { return c.axis == f.axis && c.dir == f.dir; });
        if (same == caps.end()) caps.push_back(f);
        else if (f.gap < same->gap) *same = f;
      }
      if (caps.empty()) return std::nullopt;
      const Facing f = caps[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(caps.size()) - 1))];
      const Coord target = rng.uniform_int(cfg.eol_min, cfg.eol_max);
      if (f.gap <= target) return std::nullopt;
      const Coord grow = f.gap - target;
      Rect out = r;
      if (f.axis == 0) (f.dir > 0 ? out.x1 += grow : out.x0 -= grow);
      else (f.dir > 0 ? out.y1 += grow : out.y0 -= grow);
      return std::pair{out, target};
    }
  }
  return std::nullopt;
}

Operator operator_for(Rule r) {
  switch (r) {
    case Rule::kWidth:
      return Operator::kShrinkWidth;
    case Rule::kSpacing:
      return Operator::kPullCloser;
    case Rule::kEol:
      return Operator::kEolPush;
  }
  return Operator::kShrinkWidth;
}

std::array<std::size_t, 3> rule_counts(const DrcReport& rep) {
  return {rep.count(Rule::kWidth), rep.count(Rule::kSpacing), rep.count(Rule::kEol)};
}

}  // namespace

std::pair<Layout, InjectionPlan> inject_violations(const Layout& layout, std::span<const Rule> targets, Rng& rng,
                                                   const InjectConfig& cfg) {
  if (targets.empty()) throw NoCandidate("no target rules requested");
  if (layout.size() == 0) throw NoCandidate("layout has no shapes");
  cfg.rules.validate();
  if (!run_drc(layout, cfg.rules).clean()) throw InvalidLayout("violation injection needs a DRC-clean layout");

  unsigned target_mask = 0;
  for (Rule r : targets) target_mask |= rule_bit(r);

  ShapeBoard board(layout.extent_x(), layout.extent_y(), cfg.rules,
                   std::vector<Rect>(layout.shapes().begin(), layout.shapes().end()));
  InjectionPlan plan;
  std::vector<std::pair<Coord, Coord>> anchors;
  unsigned admitted = 0;  // rules any accepted cluster may have produced
  std::array<std::size_t, 3> baseline{0, 0, 0};
  unsigned failed_ops = 0;

  const int cluster_budget = std::max(1, cfg.groups) * 3;
  for (int tries = 0; tries < cluster_budget && static_cast<int>(anchors.size()) < cfg.groups; ++tries) {
    unsigned subset = target_mask;
    if (cfg.mixed_subsets) {
      do {
        subset = static_cast<unsigned>(rng.uniform_int(1, 7)) & target_mask;
      } while (subset == 0);
    }
    std::vector<Rule> ops;
    for (Rule r : kAllRules)
      if (subset & rule_bit(r)) ops.push_back(r);
    rng.shuffle(std::span(ops));

    // Anchor away from earlier clusters.
    std::optional<std::size_t> anchor;
    for (int a = 0; a < cfg.attempts && !anchor; ++a) {
      const auto i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(board.size()) - 1));
      const auto [cx, cy] = centre2(board[i]);
      const bool far = std::all_of(anchors.begin(), anchors.end(), [&](const auto& p) {
        const double d = std::hypot(static_cast<double>(cx - p.first), static_cast<double>(cy - p.second)) / 2;
        return d >= static_cast<double>(cfg.cluster_separation);
      });
      if (far) anchor = i;
    }
    if (!anchor) break;
    const auto [acx, acy] = centre2(board[*anchor]);
    std::vector<std::size_t> cluster;
    for (std::uint32_t j : board.near(board[*anchor], cfg.cluster_radius + 400)) {
      const auto [cx, cy] = centre2(board[j]);
      if (std::hypot(static_cast<double>(cx - acx), static_cast<double>(cy - acy)) / 2 <=
          static_cast<double>(cfg.cluster_radius))
        cluster.push_back(j);
    }

    const std::vector<Rect> snapshot = board.shapes();
    const std::size_t plan_mark = plan.steps.size();
    bool ok = true;
    for (Rule rule : ops) {
      const Operator op = operator_for(rule);
      bool placed = false;
      for (int a = 0; a < cfg.attempts && !placed; ++a) {
        const std::size_t s = cluster[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(cluster.size()) - 1))];
        const auto proposal = propose(op, board, s, rng, cfg);
        if (!proposal) continue;
        const auto mask = board.rules_against(proposal->first, s);
        if (!mask || !(*mask & rule_bit(rule)) || (*mask & ~subset)) continue;
        board.replace(s, proposal->first);
        plan.steps.push_back({op, s, proposal->second});
        placed = true;
      }
      if (!placed) {
        ok = false;
        break;
      }
    }

    if (ok) {
      // Later operators may have undone an earlier one; confirm on the whole layout.
      const Layout trial(layout.name(), layout.extent_x(), layout.extent_y(), board.shapes());
      const auto counts = rule_counts(run_drc(trial, cfg.rules));
      for (Rule r : kAllRules) {
        const auto k = static_cast<std::size_t>(r);
        if ((subset & rule_bit(r)) && counts[k] <= baseline[k]) ok = false;
        if (!((subset | admitted) & rule_bit(r)) && counts[k] > 0) ok = false;
      }
      if (ok) {
        baseline = counts;
        admitted |= subset;
        anchors.push_back({acx, acy});
        continue;
      }
    }
    ++failed_ops;
    plan.steps.resize(plan_mark);
    board = ShapeBoard(layout.extent_x(), layout.extent_y(), cfg.rules, snapshot);
  }

  if (anchors.empty())
    throw NoCandidate("no geometry admits the requested operators (" + std::to_string(failed_ops) +
                      " clusters rejected)");
  return {Layout(layout.name(), layout.extent_x(), layout.extent_y(), board.shapes()), std::move(plan)};
}

std::vector<Origin> window_origins(Coord extent_x, Coord extent_y, Coord window, Coord stride) {
  if (window <= 0 || stride <= 0) throw ExtentTooSmall("window and stride must be positive");
  if (extent_x < window || extent_y < window)
    throw ExtentTooSmall("layout extent " + std::to_string(extent_x) + "x" + std::to_string(extent_y) +
                         " is smaller than the " + std::to_string(window) + " nm window");
  auto axis = [&](Coord extent) {
    std::vector<Coord> v;
    for (Coord p = 0; p + window <= extent; p += stride) v.push_back(p);
    if (v.back() + window < extent) v.push_back(extent - window);
    return v;
  };
  const auto xs = axis(extent_x);
  const auto ys = axis(extent_y);
  std::vector<Origin> out;
  out.reserve(xs.size() * ys.size());
  for (Coord y : ys)
    for (Coord x : xs) out.push_back({x, y});
  return out;
}

BitImage rasterize(const Layout& layout, std::span<const std::uint32_t> candidates, Origin origin, Coord window) {
  const int n = static_cast<int>(window);
  BitImage img(n, n);
  for (std::uint32_t idx : candidates) {
    const Rect& r = layout[idx];
    // Cell i is covered iff x0 <= origin + i + 0.5 <= x1, i.e. x0 - origin <= i <= x1 - origin - 1.
    const Coord c0 = std::max<Coord>(0, r.x0 - origin.x);
    const Coord c1 = std::min<Coord>(window, r.x1 - origin.x);
    const Coord r0 = std::max<Coord>(0, r.y0 - origin.y);
    const Coord r1 = std::min<Coord>(window, r.y1 - origin.y);
    if (c0 >= c1 || r0 >= r1) continue;
    for (Coord row = r0; row < r1; ++row) img.fill_row(static_cast<int>(row), static_cast<int>(c0), static_cast<int>(c1));
  }
  return img;
}

BitImage rasterize(const Layout& layout, Origin origin, Coord window) {
  std::vector<std::uint32_t> all(layout.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);
  return rasterize(layout, all, origin, window);
}

WindowCropper::WindowCropper(const Layout& layout, Coord window, Coord stride)
    : layout_(&layout),
      window_(window),
      origins_(window_origins(layout.extent_x(), layout.extent_y(), window, stride)),
      grid_(layout.extent_x(), layout.extent_y(), window) {
  for (std::size_t i = 0; i < layout.size(); ++i) grid_.insert(static_cast<std::uint32_t>(i), layout[i]);
}

BitImage WindowCropper::crop(std::size_t i) const {
  const Origin o = origins_.at(i);
  const auto cand = grid_.query({o.x, o.y, o.x + window_, o.y + window_}, 0);
  return rasterize(*layout_, cand, o, window_);
}

std::vector<Window> crop_windows(const Layout& layout, Coord window, Coord stride) {
  const WindowCropper cropper(layout, window, stride);
  std::vector<Window> out;
  out.reserve(cropper.size());
  for (std::size_t i = 0; i < cropper.size(); ++i) out.push_back({cropper.origins()[i], cropper.crop(i)});
  return out;
}

unsigned window_rule_mask(const DrcReport& report, Origin origin, Coord window) {
  unsigned mask = 0;
  for (const Violation& v : report.violations) {
    const auto [cx2, cy2] = centre2(v.region);
    if (cx2 >= 2 * origin.x && cx2 <= 2 * (origin.x + window) && cy2 >= 2 * origin.y &&
        cy2 <= 2 * (origin.y + window))
      mask |= rule_bit(v.rule);
  }
  return mask;
}

bool window_cuts_marker(const Layout& layout, const DrcReport& report, Origin origin, Coord window,
                        Coord context) {
  auto reaches = [window](Coord lo, Coord hi, Coord o) {
    if (lo == hi) return lo > o && lo < o + window;
    return std::max(lo, o) < std::min(hi, o + window);
  };
  auto contained = [&](const Rect& b) {
    return b.x0 >= origin.x && b.x1 <= origin.x + window && b.y0 >= origin.y && b.y1 <= origin.y + window;
  };
  for (const Violation& v : report.violations) {
    const Rect& g = v.region;
    if (v.rule == Rule::kWidth) {
      if (!reaches(g.x0, g.x1, origin.x) || !reaches(g.y0, g.y1, origin.y)) continue;
      const auto [cx2, cy2] = centre2(g);
      if (cx2 < 2 * origin.x || cx2 > 2 * (origin.x + window) || cy2 < 2 * origin.y || cy2 > 2 * (origin.y + window))
        return true;
      continue;
    }
    // A gap marker is judged with the shapes around it: whether an edge is a
    // line end depends on the shape's extent next to the gap.
    Rect box = g;
    const Rect near{g.x0 - context, g.y0 - context, g.x1 + context, g.y1 + context};
    for (std::size_t i : v.shape_indices) {
      const Rect& s = layout[i];
      const Rect part{std::max(s.x0, near.x0), std::max(s.y0, near.y0), std::min(s.x1, near.x1),
                      std::min(s.y1, near.y1)};
      if (part.x0 > part.x1 || part.y0 > part.y1) continue;
      box = {std::min(box.x0, part.x0), std::min(box.y0, part.y0), std::max(box.x1, part.x1),
             std::max(box.y1, part.y1)};
    }
    if (reaches(box.x0, box.x1, origin.x) && reaches(box.y0, box.y1, origin.y) && !contained(box)) return true;
  }
  return false;
}

std::vector<ClipRecord> label_clips(std::span<const Window> windows, const DrcReport& report, LabelSpace space,
                                    const std::string& source, Coord window) {
  std::vector<ClipRecord> out;
  out.reserve(windows.size());
  for (const Window& w : windows)
    out.push_back({w.image, label_for_mask(space, window_rule_mask(report, w.origin, window)), w.origin, source});
  return out;
}

std::vector<SplitAssignment> balance_and_split(std::span<const ClipLabel> labels, Rng& rng,
                                               const SplitFractions& fractions) {
  std::vector<std::size_t> violating, clean;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == ClipLabel::kNdrc ? clean : violating).push_back(i);
  if (clean.size() < violating.size())
    throw InsufficientCleanClips(std::to_string(clean.size()) + " clean clips for " +
                                 std::to_string(violating.size()) + " violating clips");
  rng.shuffle(std::span(clean));
  clean.resize(violating.size());
  std::vector<std::size_t> chosen = violating;
  chosen.insert(chosen.end(), clean.begin(), clean.end());
  rng.shuffle(std::span(chosen));

  const std::size_t n = chosen.size();
  const auto n_train = std::min(n, static_cast<std::size_t>(std::llround(static_cast<double>(n) * fractions.train)));
  const auto n_val =
      std::min(n - n_train, static_cast<std::size_t>(std::llround(static_cast<double>(n) * fractions.val)));
  std::vector<SplitAssignment> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Split s = k < n_train ? Split::kTrain : (k < n_train + n_val ? Split::kVal : Split::kTest);
    out.push_back({chosen[k], s});
  }
  return out;
}

namespace {
std::string clip_path(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "clips/%06zu.pgm", k);
  return buf;
}
}  // namespace

DatasetManifest balance_and_split(std::span<const ClipRecord> records, LabelSpace space, std::uint64_t seed,
                                  const SplitFractions& fractions) {
  std::vector<ClipLabel> labels;
  labels.reserve(records.size());
  for (const auto& r : records) labels.push_back(r.label);
  Rng rng(seed);
  DatasetManifest m;
  m.seed = seed;
  m.label_space = space;
  const auto assignment = balance_and_split(labels, rng, fractions);
  for (std::size_t k = 0; k < assignment.size(); ++k) {
    const ClipRecord& r = records[assignment[k].index];
    m.entries.push_back({clip_path(k), r.label, r.origin, r.source, assignment[k].split});
  }
  return m;
}

namespace {

struct VariantResult {
  std::optional<Layout> layout;
  std::vector<std::pair<Origin, ClipLabel>> windows;
  std::string source;
};

std::vector<std::pair<std::string, std::string>> forge_config_pairs(const ForgeConfig& c) {
  auto s = [](auto v) { return std::to_string(v); };
  return {
      {"seeds", s(c.seeds)},
      {"variants", s(c.variants)},
      {"window", s(c.window)},
      {"stride", s(c.stride)},
      {"extent", s(c.seed_layout.extent_x) + "x" + s(c.seed_layout.extent_y)},
      {"groups", s(c.inject.groups)},
      {"per_class_cap", s(c.per_class_cap)},
      {"skip_partial", s(int{c.skip_partial})},
      {"fractions", s(c.fractions.train) + "/" + s(c.fractions.val) + "/" + s(c.fractions.test)},
  };
}

}  // namespace

Corpus forge_corpus(const ForgeConfig& cfg, int threads) {
  cfg.rules.validate();
  if (cfg.seeds <= 0 || cfg.variants <= 0) throw GenerationFailed("seeds and variants must be positive");

  SeedConfig seed_cfg = cfg.seed_layout;
  seed_cfg.rules = cfg.rules;
  InjectConfig inject = cfg.inject;
  inject.rules = cfg.rules;
  // The 3-rule space needs every rule combination, so clusters mix subsets.
  inject.mixed_subsets = cfg.label_space == LabelSpace::kThreeRule;
  std::vector<Rule> targets;
  if (cfg.label_space == LabelSpace::kOneRule) targets = {Rule::kWidth};
  else targets.assign(std::begin(kAllRules), std::end(kAllRules));

  const auto n_seeds = static_cast<std::size_t>(cfg.seeds);
  std::vector<Layout> seeds(n_seeds);
  parallel_for(n_seeds, threads, [&](std::size_t s) {
    Rng rng = Rng::derive(cfg.seed, 0x5eedULL, s);
    char name[16];
    std::snprintf(name, sizeof name, "s%03zu", s);
    seeds[s] = synth_seed(seed_cfg, rng, name);
  });

  const auto per_seed = static_cast<std::size_t>(cfg.variants);
  std::vector<VariantResult> results(n_seeds * per_seed);
  parallel_for(results.size(), threads, [&](std::size_t k) {
    const std::size_t s = k / per_seed, v = k % per_seed;
    VariantResult& out = results[k];
    char name[48];
    std::snprintf(name, sizeof name, "s%03zuv%04zu", s, v);
    out.source = name;
    Rng rng = Rng::derive(cfg.seed, 0x7a7aULL, s, v);
    try {
      auto [variant, plan] = inject_violations(seeds[s], targets, rng, inject);
      (void)plan;
      const DrcReport report = run_drc(variant, cfg.rules);
      for (const Origin& o : window_origins(variant.extent_x(), variant.extent_y(), cfg.window, cfg.stride)) {
        if (cfg.skip_partial && window_cuts_marker(variant, report, o, cfg.window, cfg.rules.eol_end_max_width)) continue;
        out.windows.emplace_back(o, label_for_mask(cfg.label_space, window_rule_mask(report, o, cfg.window)));
      }
      out.layout = Layout(name, variant.extent_x(), variant.extent_y(),
                          std::vector<Rect>(variant.shapes().begin(), variant.shapes().end()));
    } catch (const NoCandidate&) {
    }
  });

  Corpus corpus;
  struct Candidate {
    std::size_t variant;
    Origin origin;
    ClipLabel label;
  };
  std::vector<Candidate> candidates;
  for (std::size_t k = 0; k < results.size(); ++k) {
    ++corpus.stats.variants;
    if (!results[k].layout) {
      ++corpus.stats.skipped_variants;
      continue;
    }
    for (const auto& [o, label] : results[k].windows) {
      candidates.push_back({k, o, label});
      corpus.stats.violating_windows += label != ClipLabel::kNdrc;
    }
  }
  corpus.stats.windows = candidates.size();

  if (cfg.per_class_cap > 0) {
    Rng cap_rng = Rng::derive(cfg.seed, 0xCA9ULL);
    std::vector<bool> keep(candidates.size(), true);
    for (ClipLabel label : class_labels(cfg.label_space)) {
      if (label == ClipLabel::kNdrc) continue;
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < candidates.size(); ++i)
        if (candidates[i].label == label) idx.push_back(i);
      if (idx.size() <= cfg.per_class_cap) continue;
      cap_rng.shuffle(std::span(idx));
      for (std::size_t i = cfg.per_class_cap; i < idx.size(); ++i) keep[idx[i]] = false;
    }
    std::vector<Candidate> kept;
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (keep[i]) kept.push_back(candidates[i]);
    candidates = std::move(kept);
  }

  std::vector<ClipLabel> labels;
  labels.reserve(candidates.size());
  for (const auto& c : candidates) labels.push_back(c.label);
  Rng split_rng = Rng::derive(cfg.seed, 0xBA1ULL);
  const auto assignment = balance_and_split(labels, split_rng, cfg.fractions);

  DatasetManifest& m = corpus.manifest;
  m.seed = cfg.seed;
  m.label_space = cfg.label_space;
  m.rules = cfg.rules;
  m.config = forge_config_pairs(cfg);
  m.entries.reserve(assignment.size());
  for (std::size_t k = 0; k < assignment.size(); ++k) {
    const Candidate& c = candidates[assignment[k].index];
    m.entries.push_back({clip_path(k), c.label, c.origin, results[c.variant].source, assignment[k].split});
  }

  corpus.images.resize(assignment.size());
  parallel_for(assignment.size(), threads, [&](std::size_t k) {
    const Candidate& c = candidates[assignment[k].index];
    corpus.images[k] = rasterize(*results[c.variant].layout, c.origin, cfg.window);
  });
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir, int threads) {
  std::filesystem::create_directories(dir / "clips");
  parallel_for(corpus.images.size(), threads,
               [&](std::size_t k) { write_pgm(dir / corpus.manifest.entries[k].path, corpus.images[k]); });
  write_manifest(dir / "manifest.csv", corpus.manifest);
}

}  // namespace drcnet
