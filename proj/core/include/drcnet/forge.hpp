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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "drcnet/geometry.hpp"
#include "drcnet/image.hpp"
#include "drcnet/labels.hpp"
#include "drcnet/manifest.hpp"
#include "drcnet/rng.hpp"
#include "drcnet/spatial_grid.hpp"

namespace drcnet {

// Parameters of the synthetic DRC-clean seed layouts: tiles of parallel
// tracks (orientation drawn per tile) cut into segments, plus short stubs.
struct SeedConfig {
  Coord extent_x = 2000;
  Coord extent_y = 2000;
  int min_wires = 1;    // fewer placed shapes than this -> GenerationFailed
  int max_wires = 400;  // placement stops once this many shapes exist
  Coord width_min = 32;
  Coord width_max = 40;
  Coord spacing_min = 48;  // side-to-side gap between tracks; pitch = width + spacing
  Coord spacing_max = 90;
  Coord end_gap_min = 64;  // line-end to line-end gap along a track
  Coord end_gap_max = 160;
  Coord segment_min = 80;
  Coord segment_max = 300;
  Coord tile = 500;
  int stubs = 24;
  // Minimum gap between any two seed shapes, also across tile borders and
  // around stubs. 0 leaves only the rules.
  Coord clearance = 48;
  RuleSet rules;
};

// Builds a layout that the oracle certifies clean. Candidate shapes that would
// touch a neighbour or break a rule are dropped, so over-dense configurations
// come out sparser; GenerationFailed if fewer than min_wires shapes survive.
Layout synth_seed(const SeedConfig& cfg, Rng& rng, std::string name = "seed");

enum class Operator : std::uint8_t { kShrinkWidth, kPullCloser, kEolPush };
std::string_view operator_name(Operator op);

struct Perturbation {
  Operator op = Operator::kShrinkWidth;
  std::size_t shape = 0;
  Coord magnitude = 0;  // new short side, or new gap, in nm
};

struct InjectionPlan {
  std::vector<Perturbation> steps;
};

struct InjectConfig {
  int groups = 3;              // violation clusters per variant
  bool mixed_subsets = false;  // each cluster takes a random non-empty subset of the targets
  Coord cluster_radius = 90;   // operators act on shapes whose centre is this close to the anchor
  Coord cluster_separation = 450;
  Coord shrink_min = 14;  // SHRINK_WIDTH short side range
  Coord shrink_max = 27;
  Coord pull_min = 4;  // PULL_CLOSER gap range
  Coord pull_max = 35;
  Coord eol_min = 36;  // EOL_PUSH gap range
  Coord eol_max = 44;
  int attempts = 48;  // random candidates tried per operator
  RuleSet rules;
};

// Perturbs a clean layout so that it breaks the target rules. Each operator is
// kept only if the oracle afterwards reports its rule and no rule outside the
// cluster's target set. Throws NoCandidate when targets is empty or when no
// geometry admits a requested operator.
std::pair<Layout, InjectionPlan> inject_violations(const Layout& layout, std::span<const Rule> targets, Rng& rng,
                                                   const InjectConfig& cfg = {});

// Window origins at multiples of stride, plus a final row/column clamped to
// extent - window when the stride does not land there. Row-major (y, then x).
std::vector<Origin> window_origins(Coord extent_x, Coord extent_y, Coord window = 200, Coord stride = 150);

// Pixel (i, j) = 1 iff (origin.x + i + 0.5, origin.y + j + 0.5) is inside a shape.
BitImage rasterize(const Layout& layout, Origin origin, Coord window = 200);
BitImage rasterize(const Layout& layout, std::span<const std::uint32_t> candidates, Origin origin, Coord window);

struct Window {
  Origin origin;
  BitImage image;
};

// Lazy cropping: origins up front, rasters on demand. crop() is const and
// safe to call from several threads.
class WindowCropper {
 public:
  WindowCropper(const Layout& layout, Coord window = 200, Coord stride = 150);
  const std::vector<Origin>& origins() const { return origins_; }
  std::size_t size() const { return origins_.size(); }
  Coord window() const { return window_; }
  BitImage crop(std::size_t i) const;

 private:
  const Layout* layout_;
  Coord window_;
  std::vector<Origin> origins_;
  SpatialGrid grid_;
};

std::vector<Window> crop_windows(const Layout& layout, Coord window = 200, Coord stride = 150);

// Rule bitmask of violations whose marker centroid lies in the closed window.
unsigned window_rule_mask(const DrcReport& report, Origin origin, Coord window);
// True when the window shows only part of some violation: a width marker
// reaching into the window with its centroid outside the closed window, or a
// spacing/EOL gap whose surroundings (the gap plus the parts of its two shapes
// within `context` of it) reach into the window without lying inside it.
bool window_cuts_marker(const Layout& layout, const DrcReport& report, Origin origin, Coord window,
                        Coord context = 40);

struct ClipRecord {
  BitImage image;
  ClipLabel label = ClipLabel::kNdrc;
  Origin origin;
  std::string source;
};

// Labels crops from a report computed on the full source layout.
std::vector<ClipRecord> label_clips(std::span<const Window> windows, const DrcReport& report, LabelSpace space,
                                    const std::string& source, Coord window = 200);

struct SplitFractions {
  double train = 0.80;
  double val = 0.15;
  double test = 0.05;
};

struct SplitAssignment {
  std::size_t index;  // into the input
  Split split;
};

// Keeps every violating clip, subsamples NDRC clips to the same count,
// shuffles and assigns splits (train and val rounded to nearest, test takes
// the remainder). Throws InsufficientCleanClips.
std::vector<SplitAssignment> balance_and_split(std::span<const ClipLabel> labels, Rng& rng,
                                               const SplitFractions& fractions = {});

// Same, producing a manifest whose entries are in shuffled order with paths
// clips/NNNNNN.pgm. The manifest records `seed`, which seeds the shuffle.
DatasetManifest balance_and_split(std::span<const ClipRecord> records, LabelSpace space, std::uint64_t seed,
                                  const SplitFractions& fractions = {});

// Full generation flow: seeds -> injected variants -> oracle -> windows ->
// labels -> balance -> split -> rasters.
struct ForgeConfig {
  std::uint64_t seed = 1;
  int seeds = 50;
  int variants = 100;  // per seed
  LabelSpace label_space = LabelSpace::kThreeRule;
  SeedConfig seed_layout;
  InjectConfig inject;
  RuleSet rules;
  Coord window = 200;
  Coord stride = 150;
  SplitFractions fractions;
  // When nonzero, each violating class is subsampled to at most this many
  // clips before balancing.
  std::size_t per_class_cap = 0;
  // Drop windows that show only part of a violation (see window_cuts_marker).
  bool skip_partial = false;
};

struct ForgeStats {
  std::size_t variants = 0;
  std::size_t skipped_variants = 0;  // NoCandidate
  std::size_t windows = 0;
  std::size_t violating_windows = 0;
};

struct Corpus {
  DatasetManifest manifest;
  std::vector<BitImage> images;  // parallel to manifest.entries
  ForgeStats stats;
};

Corpus forge_corpus(const ForgeConfig& cfg, int threads = 1);

// Writes clips/*.pgm and manifest.csv under dir.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir, int threads = 1);

}  // namespace drcnet
