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

#include "drcnet/scan.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "drcnet/errors.hpp"
#include "drcnet/forge.hpp"
#include "drcnet/model_io.hpp"
#include "drcnet/parallel.hpp"

namespace drcnet {

std::size_t LayoutScanReport::flagged_count() const {
  return static_cast<std::size_t>(std::count_if(windows.begin(), windows.end(), [](const ScannedWindow& w) {
    return w.flagged();
  }));
}

LayoutScanReport scan_layout(const nn::Model& model, const Layout& layout, Coord window, Coord stride, int threads) {
  const nn::ModelSpec& spec = model.spec();
  if (spec.input_h != window || spec.input_w != window || spec.input_c != 1)
    throw ModelShapeMismatch("model expects " + std::to_string(spec.input_w) + "x" + std::to_string(spec.input_h) +
                             "x" + std::to_string(spec.input_c) + " input, scan window is " + std::to_string(window));
  if (spec.output_dim != 2 && spec.output_dim != 8)
    throw ModelShapeMismatch("model has " + std::to_string(spec.output_dim) + " outputs, expected 2 or 8");

  const auto t0 = std::chrono::steady_clock::now();
  const WindowCropper cropper(layout, window, stride);
  const int workers = std::max(1, std::min(resolve_threads(threads), static_cast<int>(cropper.size())));
  std::vector<nn::Workspace> ws;
  for (int w = 0; w < workers; ++w) ws.emplace_back(spec);

  LayoutScanReport r;
  r.layout_name = layout.name();
  char id[16];
  std::snprintf(id, sizeof id, "%08x", nn::model_checksum(model));
  r.model_id = id;
  r.window = window;
  r.stride = stride;
  r.extent_x = layout.extent_x();
  r.extent_y = layout.extent_y();
  r.label_space = model.label_space();
  r.windows.resize(cropper.size());
  parallel_for_workers(cropper.size(), workers, [&](std::size_t i, int worker) {
    const BitImage img = cropper.crop(i);
    const nn::Prediction p = nn::predict(model, img, ws[static_cast<std::size_t>(worker)]);
    ScannedWindow& out = r.windows[i];
    out.origin = cropper.origins()[i];
    out.label = p.label;
    out.class_index = p.class_index;
    out.probs.assign(p.probs.values().begin(), p.probs.values().end());
  });
  r.duration = std::chrono::steady_clock::now() - t0;
  return r;
}

ViolationMask emit_mask(const LayoutScanReport& report, Coord extent_x, Coord extent_y) {
  ViolationMask m;
  m.width = extent_x;
  m.height = extent_y;
  m.bits.assign(static_cast<std::size_t>(extent_x) * static_cast<std::size_t>(extent_y), 0);
  for (const ScannedWindow& w : report.windows) {
    if (!w.flagged()) continue;
    const auto bits = static_cast<std::uint8_t>(label_mask(w.label));
    const Coord x0 = std::clamp<Coord>(w.origin.x, 0, extent_x), x1 = std::clamp<Coord>(w.origin.x + report.window, 0, extent_x);
    const Coord y0 = std::clamp<Coord>(w.origin.y, 0, extent_y), y1 = std::clamp<Coord>(w.origin.y + report.window, 0, extent_y);
    for (Coord y = y0; y < y1; ++y) {
      std::uint8_t* row = m.bits.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(extent_x);
      for (Coord x = x0; x < x1; ++x) row[x] |= bits;
    }
  }
  return m;
}

ViolationMask emit_mask(const LayoutScanReport& report) { return emit_mask(report, report.extent_x, report.extent_y); }

void write_mask_pgm(const std::filesystem::path& path, const ViolationMask& mask) {
  std::vector<std::uint8_t> px(mask.bits.size());
  std::transform(mask.bits.begin(), mask.bits.end(), px.begin(),
                 [](std::uint8_t b) { return static_cast<std::uint8_t>((b & 7u) * 32u); });
  write_gray_pgm(path, static_cast<int>(mask.width), static_cast<int>(mask.height), px);
}

void write_scan_report(std::ostream& out, const LayoutScanReport& r, bool with_timing) {
  out << "# layout=" << r.layout_name << '\n';
  out << "# model=" << r.model_id << '\n';
  out << "# window=" << r.window << '\n';
  out << "# stride=" << r.stride << '\n';
  out << "# extent=" << r.extent_x << 'x' << r.extent_y << '\n';
  out << "# windows=" << r.windows.size() << '\n';
  out << "# flagged=" << r.flagged_count() << '\n';
  if (with_timing) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", r.duration.count());
    out << "# duration_ms=" << buf << '\n';
  }
  out << "origin_x,origin_y,label";
  const std::size_t d = class_count(r.label_space);
  for (std::size_t k = 0; k < d; ++k) out << ",p_" << k;
  out << '\n';
  char buf[32];
  for (const ScannedWindow& w : r.windows) {
    out << w.origin.x << ',' << w.origin.y << ',' << label_name(w.label);
    for (float p : w.probs) {
      std::snprintf(buf, sizeof buf, ",%.9g", static_cast<double>(p));
      out << buf;
    }
    out << '\n';
  }
}

void write_scan_report(const std::filesystem::path& path, const LayoutScanReport& report, bool with_timing) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_scan_report(out, report, with_timing);
}

namespace {
double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
}  // namespace

BenchReport benchmark(const nn::Model& model, const Layout& layout, const RuleSet& rules, int reps, int threads,
                      Coord window, Coord stride) {
  if (reps <= 0) throw SpecError("benchmark needs at least one repetition");
  rules.validate();
  std::vector<double> cnn, oracle;
  BenchReport b;
  b.reps = reps;
  for (int i = 0; i < reps; ++i) {
    const LayoutScanReport s = scan_layout(model, layout, window, stride, threads);
    cnn.push_back(s.duration.count());
    b.windows = s.windows.size();
    b.flagged_windows = s.flagged_count();
  }
  for (int i = 0; i < reps; ++i) {
    const DrcReport d = run_drc(layout, rules);
    oracle.push_back(d.duration.count());
    b.oracle_violations = d.violations.size();
  }
  b.cnn_ms = median(cnn);
  b.oracle_ms = median(oracle);
  b.ratio = b.cnn_ms > 0.0 ? b.oracle_ms / b.cnn_ms : 0.0;
  return b;
}

void write_bench_report(std::ostream& out, const BenchReport& b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "cnn_ms %.3f\noracle_ms %.3f\nratio %.4f\nwindows %zu\nreps %d\n", b.cnn_ms,
                b.oracle_ms, b.ratio, b.windows, b.reps);
  out << buf;
  std::snprintf(buf, sizeof buf, "windows_per_second %.1f\noracle_violations %zu\nflagged_windows %zu\n",
                b.windows_per_second(), b.oracle_violations, b.flagged_windows);
  out << buf;
}

}  // namespace drcnet
