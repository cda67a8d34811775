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

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "drcnet/image.hpp"
#include "drcnet/manifest.hpp"
#include "drcnet/model.hpp"

namespace drcnet::nn {

// Rasterized clips with class indices in the model's label space.
struct ClipSet {
  std::vector<BitImage> images;
  std::vector<std::size_t> targets;
  std::size_t size() const { return images.size(); }
};

// Loads one split of a manifest stored under dir. Throws DataError on an
// unreadable clip.
ClipSet load_split(const DatasetManifest& manifest, const std::filesystem::path& dir, Split split,
                   int threads = 1);
// Same, from clips already held in memory (parallel to manifest.entries).
ClipSet select_split(const DatasetManifest& manifest, const std::vector<BitImage>& images, Split split);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int kept_epoch = 0;  // epoch whose weights the model holds on return
};

struct TrainOptions {
  int threads = 1;
  std::function<void(const EpochRecord&)> on_epoch;
  // Checked after each epoch; returning true ends training early.
  std::function<bool(const EpochRecord&)> stop;
  // Return the weights of the epoch with the lowest validation loss instead
  // of the last epoch's. Ignored without a validation set.
  bool keep_best = false;
};

// Mini-batch RMSprop over `train`, shuffled each epoch from cfg.seed. The
// validation set is only evaluated. Throws LabelSpaceMismatch when a target is
// outside the model's classes and NumericalError when a loss or weight turns
// non-finite.
TrainHistory train(Model& model, const ClipSet& train_set, const ClipSet& val_set, const TrainConfig& cfg,
                   const TrainOptions& opts = {});

// Loads train and val splits of the manifest and trains on them.
TrainHistory train(Model& model, const DatasetManifest& manifest, const std::filesystem::path& dir,
                   const TrainConfig& cfg, const TrainOptions& opts = {});

struct EvalResult {
  double loss = 0.0;  // mean cross-entropy
  double accuracy = 0.0;
  std::vector<std::size_t> predictions;  // class indices, parallel to the set
};
EvalResult evaluate(const Model& model, const ClipSet& set, int threads = 1);

// `epoch,train_loss,val_loss,val_accuracy,seconds`, one row per epoch, with
// `#` header lines for the producing configuration.
void write_history(std::ostream& out, const TrainHistory& history,
                   const std::vector<std::pair<std::string, std::string>>& config = {}, bool with_seconds = true);
void write_history(const std::filesystem::path& path, const TrainHistory& history,
                   const std::vector<std::pair<std::string, std::string>>& config = {}, bool with_seconds = true);

}  // namespace drcnet::nn
