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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "drcnet/geometry.hpp"
#include "drcnet/manifest.hpp"
#include "drcnet/model.hpp"

namespace drcnet {

struct ScannedWindow {
  Origin origin;
  ClipLabel label = ClipLabel::kNdrc;
  std::size_t class_index = 0;
  std::vector<float> probs;
  bool flagged() const { return label != ClipLabel::kNdrc; }
};

struct LayoutScanReport {
  std::string layout_name;
  std::string model_id;  // crc32 of the weight blob, hex
  Coord window = 200;
  Coord stride = 150;
  Coord extent_x = 0;
  Coord extent_y = 0;
  LabelSpace label_space = LabelSpace::kOneRule;
  std::vector<ScannedWindow> windows;  // every window, in origin order
  std::chrono::duration<double, std::milli> duration{0};

  std::size_t flagged_count() const;
};

// Crops the layout exactly as the dataset generator does, rasterizes and
// classifies every window. Throws ExtentTooSmall or ModelShapeMismatch.
LayoutScanReport scan_layout(const nn::Model& model, const Layout& layout, Coord window = 200, Coord stride = 150,
                             int threads = 1);

// Per-pixel rule bitmask over the layout extent (1 px per nm).
struct ViolationMask {
  Coord width = 0;
  Coord height = 0;
  std::vector<std::uint8_t> bits;  // row-major, bit k = rule with mask 1 << k

  std::uint8_t at(Coord x, Coord y) const {
    return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
};

// Paints each flagged window's rule set over its footprint; overlaps union.
ViolationMask emit_mask(const LayoutScanReport& report, Coord extent_x, Coord extent_y);
ViolationMask emit_mask(const LayoutScanReport& report);
// Graymap with pixel = bitmask * 32.
void write_mask_pgm(const std::filesystem::path& path, const ViolationMask& mask);

// `# key=value` header lines, then `origin_x,origin_y,label,p_0,...`.
void write_scan_report(std::ostream& out, const LayoutScanReport& report, bool with_timing = true);
void write_scan_report(const std::filesystem::path& path, const LayoutScanReport& report, bool with_timing = true);

struct BenchReport {
  double cnn_ms = 0.0;     // median scan_layout time
  double oracle_ms = 0.0;  // median run_drc time
  double ratio = 0.0;      // oracle_ms / cnn_ms
  std::size_t windows = 0;
  int reps = 0;
  std::size_t oracle_violations = 0;
  std::size_t flagged_windows = 0;

  double windows_per_second() const { return cnn_ms > 0.0 ? 1000.0 * static_cast<double>(windows) / cnn_ms : 0.0; }
};

// Times the model scan and the oracle on the same layout, median of `reps`.
BenchReport benchmark(const nn::Model& model, const Layout& layout, const RuleSet& rules, int reps = 3,
                      int threads = 1, Coord window = 200, Coord stride = 150);
void write_bench_report(std::ostream& out, const BenchReport& report);

}  // namespace drcnet
