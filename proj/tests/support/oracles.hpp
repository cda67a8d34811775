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

// Reference implementations used only by tests. They are deliberately
// straightforward (all pairs, nested loops, double precision) and share no
// code with the library beyond its plain data types.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <tuple>
#include <vector>

#include "drcnet/geometry.hpp"
#include "drcnet/model.hpp"
#include "drcnet/rng.hpp"

namespace drcnet::testing {

// ---- rule checking ---------------------------------------------------------

struct NaiveViolation {
  Rule rule;
  std::vector<std::size_t> shapes;
  Rect region;
  friend bool operator==(const NaiveViolation&, const NaiveViolation&) = default;
  friend bool operator<(const NaiveViolation& a, const NaiveViolation& b) {
    return std::tie(a.rule, a.shapes, a.region.x0, a.region.y0, a.region.x1, a.region.y1) <
           std::tie(b.rule, b.shapes, b.region.x0, b.region.y0, b.region.x1, b.region.y1);
  }
};

// Closed interval between two 1-D intervals' nearest points: their overlap, or
// the gap between them.
inline std::pair<Coord, Coord> near_interval(Coord a0, Coord a1, Coord b0, Coord b1) {
  const Coord lo = std::max(a0, b0), hi = std::min(a1, b1);
  if (lo <= hi) return {lo, hi};
  return {hi, lo};
}

inline double naive_distance(const Rect& a, const Rect& b) {
  // Closest points, found by clamping each corner of one box onto the other
  // and vice versa, then taking the minimum over all candidates.
  auto clamp_dist = [](const Rect& r, Coord px, Coord py) {
    const double cx = std::clamp(px, r.x0, r.x1), cy = std::clamp(py, r.y0, r.y1);
    return std::hypot(cx - static_cast<double>(px), cy - static_cast<double>(py));
  };
  double best = INFINITY;
  // Edge-to-edge separations where the projections overlap.
  const auto [ix0, ix1] = near_interval(a.x0, a.x1, b.x0, b.x1);
  const auto [iy0, iy1] = near_interval(a.y0, a.y1, b.y0, b.y1);
  const bool x_overlap = std::max(a.x0, b.x0) <= std::min(a.x1, b.x1);
  const bool y_overlap = std::max(a.y0, b.y0) <= std::min(a.y1, b.y1);
  if (x_overlap && y_overlap) return 0.0;
  if (x_overlap) best = static_cast<double>(iy1 - iy0);
  if (y_overlap) best = std::min(best, static_cast<double>(ix1 - ix0));
  for (Coord px : {a.x0, a.x1})
    for (Coord py : {a.y0, a.y1}) best = std::min(best, clamp_dist(b, px, py));
  for (Coord px : {b.x0, b.x1})
    for (Coord py : {b.y0, b.y1}) best = std::min(best, clamp_dist(a, px, py));
  return best;
}

// Line-end caps of r facing s: returns the marker of the first facing cap
// (bottom, top, left, right) closer than the EOL limit.
inline std::optional<Rect> naive_eol(const Rect& r, const Rect& s, const RuleSet& rules) {
  const Coord w = r.x1 - r.x0, h = r.y1 - r.y0, shortest = std::min(w, h);
  if (shortest > rules.eol_end_max_width) return std::nullopt;
  struct Cap {
    bool horizontal;  // edge runs along x
    Coord at;         // the edge's coordinate
    int normal;       // +1 outward toward larger coordinates
  };
  std::vector<Cap> caps;
  if (w == shortest) {
    caps.push_back({true, r.y0, -1});
    caps.push_back({true, r.y1, +1});
  }
  if (h == shortest) {
    caps.push_back({false, r.x0, -1});
    caps.push_back({false, r.x1, +1});
  }
  for (const Cap& c : caps) {
    // Perpendicular extent of the cap and of s.
    const Coord c0 = c.horizontal ? r.x0 : r.y0, c1 = c.horizontal ? r.x1 : r.y1;
    const Coord s0 = c.horizontal ? s.x0 : s.y0, s1 = c.horizontal ? s.x1 : s.y1;
    const Coord lo = std::max(c0, s0), hi = std::min(c1, s1);
    if (lo >= hi) continue;
    // Axial position of s's near face beyond the cap.
    const Coord near = c.normal > 0 ? (c.horizontal ? s.y0 : s.x0) : (c.horizontal ? s.y1 : s.x1);
    const Coord d = (near - c.at) * c.normal;
    const bool beyond = c.normal > 0 ? (c.horizontal ? s.y0 >= c.at : s.x0 >= c.at)
                                     : (c.horizontal ? s.y1 <= c.at : s.x1 <= c.at);
    if (!beyond || d <= 0 || d >= rules.eol_spacing) continue;
    const Coord a0 = std::min(c.at, near), a1 = std::max(c.at, near);
    return c.horizontal ? Rect{lo, a0, hi, a1} : Rect{a0, lo, a1, hi};
  }
  return std::nullopt;
}

inline std::vector<NaiveViolation> naive_drc(const std::vector<Rect>& shapes, const RuleSet& rules) {
  std::vector<NaiveViolation> out;
  for (std::size_t i = 0; i < shapes.size(); ++i)
    if (std::min(shapes[i].x1 - shapes[i].x0, shapes[i].y1 - shapes[i].y0) < rules.min_width)
      out.push_back({Rule::kWidth, {i}, shapes[i]});
  for (std::size_t i = 0; i < shapes.size(); ++i)
    for (std::size_t j = i + 1; j < shapes.size(); ++j) {
      const Rect& a = shapes[i];
      const Rect& b = shapes[j];
      const double d = naive_distance(a, b);
      if (d > 0 && d < static_cast<double>(rules.min_spacing)) {
        const auto [x0, x1] = near_interval(a.x0, a.x1, b.x0, b.x1);
        const auto [y0, y1] = near_interval(a.y0, a.y1, b.y0, b.y1);
        out.push_back({Rule::kSpacing, {i, j}, Rect{x0, y0, x1, y1}});
      }
      auto e = naive_eol(a, b, rules);
      if (!e) e = naive_eol(b, a, rules);
      if (e) out.push_back({Rule::kEol, {i, j}, *e});
    }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<NaiveViolation> as_naive(const std::vector<Violation>& vs) {
  std::vector<NaiveViolation> out;
  for (const Violation& v : vs) out.push_back({v.rule, v.shape_indices, v.region});
  std::sort(out.begin(), out.end());
  return out;
}

// Up to n disjoint rectangles packed into a small square so that many pairs
// land near the rule limits. Thin wires are common so line ends show up.
inline std::vector<Rect> random_shapes(Rng& rng, std::size_t n, Coord extent = 600) {
  std::vector<Rect> out;
  for (int attempt = 0; attempt < 400 && out.size() < n; ++attempt) {
    Coord w, h;
    switch (rng.uniform_int(0, 2)) {
      case 0:  // vertical wire
        w = rng.uniform_int(14, 50);
        h = rng.uniform_int(60, 300);
        break;
      case 1:  // horizontal wire
        w = rng.uniform_int(60, 300);
        h = rng.uniform_int(14, 50);
        break;
      default:  // pad
        w = rng.uniform_int(20, 90);
        h = rng.uniform_int(20, 90);
    }
    if (w >= extent || h >= extent) continue;
    const Coord x = rng.uniform_int(0, extent - w), y = rng.uniform_int(0, extent - h);
    const Rect r{x, y, x + w, y + h};
    bool ok = true;
    for (const Rect& o : out)
      if (naive_distance(r, o) <= 0.0) ok = false;
    if (ok) out.push_back(r);
  }
  return out;
}

// ---- network ---------------------------------------------------------------

// Direct double-precision evaluation of a model's loss on one input, reading
// parameters straight from the tensors in declaration order.
struct NaiveNet {
  const nn::ModelSpec& spec;
  std::vector<std::vector<double>> params;

  explicit NaiveNet(const nn::Model& m) : spec(m.spec()) {
    for (const auto& t : m.params()) params.emplace_back(t.values().begin(), t.values().end());
  }

  // input is [H, W, C]; returns softmax probabilities. When pattern is given
  // it receives every ReLU on/off decision and pooling choice, which fixes the
  // piecewise-linear region the evaluation fell in.
  std::vector<double> probs(const std::vector<double>& input, std::vector<int>* pattern = nullptr) const {
    int h = spec.input_h, w = spec.input_w, c = spec.input_c;
    std::vector<double> x = input;
    for (std::size_t s = 0; s < spec.stages.size(); ++s) {
      const int f = spec.stages[s].filters;
      const int p = spec.stages[s].padding == nn::Padding::kSame ? 1 : 0;
      const int oh = h + 2 * p - 2, ow = w + 2 * p - 2;
      const auto& k = params[2 * s];
      const auto& b = params[2 * s + 1];
      std::vector<double> y(static_cast<std::size_t>(oh * ow * f));
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox)
          for (int fo = 0; fo < f; ++fo) {
            double acc = b[static_cast<std::size_t>(fo)];
            for (int ky = 0; ky < 3; ++ky)
              for (int kx = 0; kx < 3; ++kx)
                for (int ci = 0; ci < c; ++ci) {
                  const int iy = oy + ky - p, ix = ox + kx - p;
                  if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
                  acc += x[static_cast<std::size_t>((iy * w + ix) * c + ci)] *
                         k[static_cast<std::size_t>(((fo * 3 + ky) * 3 + kx) * c + ci)];
                }
            y[static_cast<std::size_t>((oy * ow + ox) * f + fo)] = std::max(0.0, acc);
            if (pattern) pattern->push_back(acc > 0.0);
          }
      const int ph = oh / 2, pw = ow / 2;
      std::vector<double> pooled(static_cast<std::size_t>(ph * pw * f));
      for (int py = 0; py < ph; ++py)
        for (int px = 0; px < pw; ++px)
          for (int fo = 0; fo < f; ++fo) {
            double m = -INFINITY;
            int which = 0;
            for (int dy = 0; dy < 2; ++dy)
              for (int dx = 0; dx < 2; ++dx) {
                const double v = y[static_cast<std::size_t>(((2 * py + dy) * ow + 2 * px + dx) * f + fo)];
                if (v > m) {
                  m = v;
                  which = dy * 2 + dx;
                }
              }
            pooled[static_cast<std::size_t>((py * pw + px) * f + fo)] = m;
            if (pattern) pattern->push_back(which);
          }
      x = std::move(pooled);
      h = ph;
      w = pw;
      c = f;
    }
    const std::size_t fc = 2 * spec.stages.size();
    auto dense = [&](const std::vector<double>& in, std::size_t wi, int m, bool relu) {
      const auto& wt = params[wi];
      const auto& bs = params[wi + 1];
      std::vector<double> outv(static_cast<std::size_t>(m));
      for (int r = 0; r < m; ++r) {
        double acc = bs[static_cast<std::size_t>(r)];
        for (std::size_t q = 0; q < in.size(); ++q) acc += wt[static_cast<std::size_t>(r) * in.size() + q] * in[q];
        outv[static_cast<std::size_t>(r)] = relu ? std::max(0.0, acc) : acc;
        if (relu && pattern) pattern->push_back(acc > 0.0);
      }
      return outv;
    };
    const auto hidden = dense(x, fc, spec.fc_size, true);
    const auto logits = dense(hidden, fc + 2, spec.output_dim, false);
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> pr(logits.size());
    double sum = 0;
    for (std::size_t i = 0; i < logits.size(); ++i) sum += (pr[i] = std::exp(logits[i] - mx));
    for (double& v : pr) v /= sum;
    return pr;
  }

  double loss(const std::vector<double>& input, std::size_t target, std::vector<int>* pattern = nullptr) const {
    return -std::log(std::max(probs(input, pattern)[target], 1e-12));
  }
};

}  // namespace drcnet::testing
