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

#include "drcnet/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>

#include "drcnet/errors.hpp"
#include "drcnet/parallel.hpp"

namespace drcnet::nn {
namespace {

void check_targets(const Model& model, const ClipSet& set, const char* which) {
  if (set.images.size() != set.targets.size()) throw ShapeMismatch(std::string(which) + " images and targets differ");
  const auto d = static_cast<std::size_t>(model.spec().output_dim);
  for (std::size_t t : set.targets)
    if (t >= d)
      throw LabelSpaceMismatch(std::string(which) + " set has class " + std::to_string(t) + " but the model has " +
                               std::to_string(d) + " outputs");
}

std::size_t target_of(const ManifestEntry& e, LabelSpace space) {
  try {
    return class_index(space, e.label);
  } catch (const Error&) {
    throw LabelSpaceMismatch("label " + std::string(label_name(e.label)) + " is outside the manifest's label space");
  }
}

}  // namespace

ClipSet load_split(const DatasetManifest& manifest, const std::filesystem::path& dir, Split split, int threads) {
  std::vector<const ManifestEntry*> picked;
  for (const ManifestEntry& e : manifest.entries)
    if (e.split == split) picked.push_back(&e);
  ClipSet set;
  set.images.resize(picked.size());
  set.targets.resize(picked.size());
  for (std::size_t i = 0; i < picked.size(); ++i) set.targets[i] = target_of(*picked[i], manifest.label_space);
  parallel_for(picked.size(), threads, [&](std::size_t i) { set.images[i] = read_pgm(dir / picked[i]->path); });
  return set;
}

ClipSet select_split(const DatasetManifest& manifest, const std::vector<BitImage>& images, Split split) {
  if (images.size() != manifest.entries.size()) throw DataError("image list does not match the manifest");
  ClipSet set;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const ManifestEntry& e = manifest.entries[i];
    if (e.split != split) continue;
    set.images.push_back(images[i]);
    set.targets.push_back(target_of(e, manifest.label_space));
  }
  return set;
}

EvalResult evaluate(const Model& model, const ClipSet& set, int threads) {
  check_targets(model, set, "evaluation");
  const std::size_t n = set.size();
  const int workers = static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(resolve_threads(threads), n)));
  std::vector<Workspace> ws;
  for (int w = 0; w < workers; ++w) ws.emplace_back(model.spec());
  std::vector<double> losses(n);
  EvalResult r;
  r.predictions.resize(n);
  parallel_for_workers(n, workers, [&](std::size_t i, int worker) {
    const Prediction p = predict(model, set.images[i], ws[static_cast<std::size_t>(worker)]);
    r.predictions[i] = p.class_index;
    losses[i] = cross_entropy(p.probs, set.targets[i]);
  });
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    r.loss += losses[i];
    correct += r.predictions[i] == set.targets[i] ? 1 : 0;
  }
  if (n > 0) {
    r.loss /= static_cast<double>(n);
    r.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  }
  return r;
}

TrainHistory train(Model& model, const ClipSet& train_set, const ClipSet& val_set, const TrainConfig& cfg,
                   const TrainOptions& opts) {
  cfg.validate();
  check_targets(model, train_set, "training");
  check_targets(model, val_set, "validation");
  model.train_config = cfg;
  TrainHistory history;
  if (cfg.epochs == 0) return history;
  if (train_set.size() == 0) throw DataError("training set is empty");

  const int threads = resolve_threads(opts.threads);
  std::vector<Workspace> ws;
  std::vector<std::size_t> order(train_set.size());
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  std::vector<const BitImage*> imgs;
  std::vector<std::size_t> tgts;
  std::optional<Model> best;
  int best_epoch = 0;
  double best_loss = std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = Rng::derive(cfg.seed, 0x7EA1, static_cast<std::uint64_t>(epoch));
    rng.shuffle(std::span<std::size_t>(order));

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      imgs.clear();
      tgts.clear();
      for (std::size_t k = start; k < end; ++k) {
        imgs.push_back(&train_set.images[order[k]]);
        tgts.push_back(train_set.targets[order[k]]);
      }
      BatchResult br = batch_gradients(model, imgs, tgts, threads, ws);
      if (!std::isfinite(br.loss_sum)) throw NumericalError("training loss became non-finite in epoch " + std::to_string(epoch));
      rmsprop_step(model, br.gradients, cfg);
      loss_sum += br.loss_sum;
    }
    for (const Tensor& p : model.params())
      if (!p.all_finite()) throw NumericalError("weights became non-finite in epoch " + std::to_string(epoch));

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    if (val_set.size() > 0) {
      const EvalResult ev = evaluate(model, val_set, threads);
      rec.val_loss = ev.loss;
      rec.val_accuracy = ev.accuracy;
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    history.epochs.push_back(rec);
    history.kept_epoch = epoch;
    if (opts.keep_best && val_set.size() > 0 && rec.val_loss < best_loss) {
      best_loss = rec.val_loss;
      best = model;
      best_epoch = epoch;
    }
    if (opts.on_epoch) opts.on_epoch(rec);
    if (opts.stop && opts.stop(rec)) break;
  }
  if (best) {
    model = std::move(*best);
    history.kept_epoch = best_epoch;
  }
  return history;
}

TrainHistory train(Model& model, const DatasetManifest& manifest, const std::filesystem::path& dir,
                   const TrainConfig& cfg, const TrainOptions& opts) {
  if (class_count(manifest.label_space) != static_cast<std::size_t>(model.spec().output_dim))
    throw LabelSpaceMismatch("dataset has " + std::to_string(class_count(manifest.label_space)) +
                             " classes, model has " + std::to_string(model.spec().output_dim) + " outputs");
  const ClipSet tr = load_split(manifest, dir, Split::kTrain, opts.threads);
  const ClipSet va = load_split(manifest, dir, Split::kVal, opts.threads);
  return train(model, tr, va, cfg, opts);
}

void write_history(std::ostream& out, const TrainHistory& history,
                   const std::vector<std::pair<std::string, std::string>>& config, bool with_seconds) {
  for (const auto& [k, v] : config) out << "# " << k << '=' << v << '\n';
  out << "epoch,train_loss,val_loss,val_accuracy,seconds\n";
  char buf[160];
  for (const EpochRecord& r : history.epochs) {
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,", r.epoch, r.train_loss, r.val_loss, r.val_accuracy);
    out << buf;
    if (with_seconds) {
      std::snprintf(buf, sizeof buf, "%.3f", r.seconds);
      out << buf;
    }
    out << '\n';
  }
}

void write_history(const std::filesystem::path& path, const TrainHistory& history,
                   const std::vector<std::pair<std::string, std::string>>& config, bool with_seconds) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_history(out, history, config, with_seconds);
}

}  // namespace drcnet::nn
