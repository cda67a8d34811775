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

// drcnet: dataset generation, training, oracle checking, scanning,
// evaluation and benchmarking from one binary.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "drcnet/errors.hpp"
#include "drcnet/forge.hpp"
#include "drcnet/layout_io.hpp"
#include "drcnet/metrics.hpp"
#include "drcnet/model_io.hpp"
#include "drcnet/parallel.hpp"
#include "drcnet/run_config.hpp"
#include "drcnet/scan.hpp"
#include "drcnet/train.hpp"

namespace fs = std::filesystem;
using namespace drcnet;

namespace {

struct Globals {
  std::string config_path;
  int threads = 0;
  std::map<std::string, std::string> overrides;
};

// Registers a flag that overrides one config key.
void key_option(CLI::App* app, Globals& g, const std::string& flag, const std::string& key, const std::string& help) {
  app->add_option_function<std::string>(flag, [&g, key](const std::string& v) { g.overrides[key] = v; }, help);
}

RunConfig resolve(const Globals& g) {
  RunConfig cfg;
  if (!g.config_path.empty()) cfg = read_run_config(fs::path(g.config_path));
  for (const auto& [k, v] : g.overrides)
    if (!set_run_config_value(cfg, k, v)) throw ParseError(0, "unknown key " + k);
  cfg.validate();
  return cfg;
}

std::string hex32(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

void print_histogram(const DatasetManifest& m) {
  std::printf("%-8s %8s %8s %8s %8s\n", "label", "train", "val", "test", "total");
  for (ClipLabel l : class_labels(m.label_space)) {
    std::size_t n[3] = {0, 0, 0};
    for (const ManifestEntry& e : m.entries)
      if (e.label == l) ++n[static_cast<int>(e.split)];
    std::printf("%-8s %8zu %8zu %8zu %8zu\n", std::string(label_name(l)).c_str(), n[0], n[1], n[2], n[0] + n[1] + n[2]);
  }
  std::printf("%-8s %8zu %8zu %8zu %8zu\n", "all", m.count(Split::kTrain), m.count(Split::kVal), m.count(Split::kTest),
              m.entries.size());
}

int cmd_gen(const Globals& g) {
  const RunConfig cfg = resolve(g);
  const fs::path out = cfg.out.empty() ? fs::path(cfg.dataset) : fs::path(cfg.out);
  const Corpus corpus = forge_corpus(cfg.forge_config(), g.threads);
  write_corpus(corpus, out, g.threads);
  std::printf("variants %zu (skipped %zu), windows %zu, violating %zu\n", corpus.stats.variants,
              corpus.stats.skipped_variants, corpus.stats.windows, corpus.stats.violating_windows);
  print_histogram(corpus.manifest);
  std::printf("wrote %s\n", (out / "manifest.csv").string().c_str());
  return 0;
}

int cmd_train(const Globals& g, std::string history_path) {
  const RunConfig cfg = resolve(g);
  const fs::path dir(cfg.dataset);
  const DatasetManifest manifest = read_manifest(dir / "manifest.csv");
  Rng rng = Rng::derive(cfg.seed, 0x1417);
  // Without an explicit preset the network follows the dataset's label space.
  const nn::Preset preset = !cfg.preset.empty() ? cfg.model_preset()
                            : manifest.label_space == LabelSpace::kOneRule ? nn::Preset::kOneRule
                                                                           : nn::Preset::kThreeRule;
  nn::Model model = nn::build_model(preset, rng);
  model.seed = cfg.seed;
  nn::TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  for (const auto& [name, count] : model.layer_parameter_counts()) std::printf("%-6s %10zu params\n", name.c_str(), count);
  std::printf("total  %10zu params\n", model.parameter_count());

  nn::TrainOptions opts;
  opts.threads = g.threads;
  opts.on_epoch = [](const nn::EpochRecord& r) {
    std::printf("epoch %3d  train_loss %.5f  val_loss %.5f  val_acc %.4f  (%.1f s)\n", r.epoch, r.train_loss, r.val_loss,
                r.val_accuracy, r.seconds);
    std::fflush(stdout);
  };
  const nn::TrainHistory history = nn::train(model, manifest, dir, tc, opts);

  const fs::path out = cfg.out.empty() ? fs::path(cfg.model) : fs::path(cfg.out);
  const std::vector<std::pair<std::string, std::string>> header = {
      {"preset", model.spec().output_dim == 2 ? "one_rule" : "three_rule"},
      {"dataset_seed", std::to_string(manifest.seed)},
      {"dataset_entries", std::to_string(manifest.entries.size())},
      {"train_clips", std::to_string(manifest.count(Split::kTrain))},
  };
  nn::save_model(out, model, header);
  if (history_path.empty()) history_path = out.string() + ".history.csv";
  nn::write_history(fs::path(history_path), history, header);
  std::printf("wrote %s and %s\n", out.string().c_str(), history_path.c_str());
  return 0;
}

int cmd_oracle(const Globals& g) {
  const RunConfig cfg = resolve(g);
  if (cfg.layout.empty()) throw DataError("oracle needs --layout");
  const Layout layout = read_layout(fs::path(cfg.layout));
  const DrcReport report = run_drc(layout, cfg.limits);
  const std::string json = drc_report_json(report);
  if (cfg.out.empty()) {
    std::cout << json;
  } else {
    std::ofstream(cfg.out) << json;
    std::printf("%zu violations (M1.1 %zu, M1.6 %zu, M1.7 %zu) in %.3f ms\n", report.violations.size(),
                report.count(Rule::kWidth), report.count(Rule::kSpacing), report.count(Rule::kEol),
                report.duration.count());
  }
  return 0;
}

int cmd_check(const Globals& g) {
  const RunConfig cfg = resolve(g);
  if (cfg.layout.empty()) throw DataError("check needs --layout");
  const nn::Model model = nn::load_model(fs::path(cfg.model));
  const Layout layout = read_layout(fs::path(cfg.layout));
  const LayoutScanReport report = scan_layout(model, layout, cfg.window, cfg.stride, g.threads);
  const std::string prefix = cfg.out.empty() ? layout.name() + "_scan" : cfg.out;
  write_scan_report(fs::path(prefix + ".csv"), report);
  write_mask_pgm(fs::path(prefix + "_mask.pgm"), emit_mask(report));
  std::printf("%zu windows, %zu flagged, %.1f ms\nwrote %s.csv and %s_mask.pgm\n", report.windows.size(),
              report.flagged_count(), report.duration.count(), prefix.c_str(), prefix.c_str());
  return 0;
}

int cmd_eval(const Globals& g) {
  const RunConfig cfg = resolve(g);
  const fs::path dir(cfg.dataset);
  const nn::Model model = nn::load_model(fs::path(cfg.model));
  const DatasetManifest manifest = read_manifest(dir / "manifest.csv");
  if (class_count(manifest.label_space) != static_cast<std::size_t>(model.spec().output_dim))
    throw LabelSpaceMismatch("model and dataset label spaces differ");
  const Split split = parse_split(cfg.split);
  const nn::ClipSet set = nn::load_split(manifest, dir, split, g.threads);
  const nn::EvalResult ev = nn::evaluate(model, set, g.threads);

  const auto classes = class_labels(manifest.label_space);
  std::vector<ClipLabel> pred, truth;
  for (std::size_t i = 0; i < set.size(); ++i) {
    pred.push_back(classes[ev.predictions[i]]);
    truth.push_back(classes[set.targets[i]]);
  }
  const EvalReport report =
      make_eval_report(confusion(pred, truth, classes), cfg.split,
                       {{"model", hex32(nn::model_checksum(model))},
                        {"dataset_seed", std::to_string(manifest.seed)},
                        {"dataset_entries", std::to_string(manifest.entries.size())}});
  write_eval_text(std::cout, report);
  if (!cfg.out.empty()) {
    std::ofstream txt(cfg.out + ".txt");
    write_eval_text(txt, report);
    std::ofstream(cfg.out + ".json") << eval_json(report);
    std::printf("wrote %s.txt and %s.json\n", cfg.out.c_str(), cfg.out.c_str());
  }
  return 0;
}

int cmd_bench(const Globals& g) {
  const RunConfig cfg = resolve(g);
  if (cfg.layout.empty()) throw DataError("bench needs --layout");
  const nn::Model model = nn::load_model(fs::path(cfg.model));
  const Layout layout = read_layout(fs::path(cfg.layout));
  const BenchReport b = benchmark(model, layout, cfg.limits, cfg.reps, g.threads, cfg.window, cfg.stride);
  std::ostringstream text;
  text << "layout " << layout.name() << ' ' << layout.extent_x() << 'x' << layout.extent_y() << ", "
       << layout.size() << " shapes\n";
  write_bench_report(text, b);
  std::cout << text.str();
  if (!cfg.out.empty()) std::ofstream(cfg.out) << text.str();
  return 0;
}

int cmd_synth(const Globals& g, int inject_groups) {
  const RunConfig cfg = resolve(g);
  if (cfg.out.empty()) throw DataError("synth needs --out");
  SeedConfig sc;
  sc.extent_x = cfg.extent_x;
  sc.extent_y = cfg.extent_y;
  sc.rules = cfg.limits;
  sc.max_wires = std::numeric_limits<int>::max();
  Rng rng = Rng::derive(cfg.seed, 0x5147);
  Layout layout = synth_seed(sc, rng, fs::path(cfg.out).stem().string());
  if (inject_groups > 0) {
    InjectConfig ic;
    ic.rules = cfg.limits;
    ic.groups = inject_groups;
    ic.mixed_subsets = cfg.rules == 3;
    std::vector<Rule> targets = {Rule::kWidth};
    if (cfg.rules == 3) targets.assign(std::begin(kAllRules), std::end(kAllRules));
    layout = inject_violations(layout, targets, rng, ic).first;
  }
  write_layout(fs::path(cfg.out), layout);
  std::printf("wrote %s: %zu shapes, %lldx%lld nm\n", cfg.out.c_str(), layout.size(),
              static_cast<long long>(layout.extent_x()), static_cast<long long>(layout.extent_y()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drcnet: learned design rule checking on metal-1 layout clips"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "flat key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--threads", g.threads, "worker threads (0: all cores); results do not depend on it")
      ->check(CLI::NonNegativeNumber);
  key_option(&app, g, "--seed", "seed", "master seed");

  auto* gen = app.add_subcommand("gen", "generate a labeled clip dataset");
  key_option(gen, g, "--out", "out", "output directory (default: dataset)");
  key_option(gen, g, "--seeds", "seeds", "number of seed layouts");
  key_option(gen, g, "--variants", "variants", "injected variants per seed");
  key_option(gen, g, "--rules", "rules", "1 (M1.1) or 3 (M1.1, M1.6, M1.7)");
  gen->add_option_function<std::string>(
      "--extent", [&g](const std::string& v) { g.overrides["extent_x"] = g.overrides["extent_y"] = v; },
      "seed layout width and height in nm");
  key_option(gen, g, "--groups", "groups", "violation clusters per variant");
  key_option(gen, g, "--per-class-cap", "per_class_cap", "max clips per violating class (0: no cap)");
  key_option(gen, g, "--skip-partial", "skip_partial", "1: drop windows that cut through a violation marker");

  std::string history;
  auto* train = app.add_subcommand("train", "train a detector on a generated dataset");
  key_option(train, g, "--dataset", "dataset", "dataset directory");
  key_option(train, g, "--preset", "preset", "one_rule or three_rule");
  key_option(train, g, "--epochs", "epochs", "training epochs");
  key_option(train, g, "--batch-size", "batch_size", "mini-batch size");
  key_option(train, g, "--learning-rate", "learning_rate", "RMSprop learning rate");
  key_option(train, g, "--decay", "decay", "RMSprop decay");
  key_option(train, g, "--out", "out", "model file (default: model)");
  train->add_option("--history", history, "history CSV (default: <model>.history.csv)");

  auto* oracle = app.add_subcommand("oracle", "run the rule checker on a layout");
  key_option(oracle, g, "--layout", "layout", "layout file");
  key_option(oracle, g, "--out", "out", "report JSON (default: stdout)");

  auto* check = app.add_subcommand("check", "scan a layout with a trained model");
  key_option(check, g, "--model", "model", "model file");
  key_option(check, g, "--layout", "layout", "layout file");
  key_option(check, g, "--out", "out", "output prefix for <prefix>.csv and <prefix>_mask.pgm");
  key_option(check, g, "--stride", "stride", "window stride in nm");

  auto* eval = app.add_subcommand("eval", "confusion matrix and detection metrics on a split");
  key_option(eval, g, "--model", "model", "model file");
  key_option(eval, g, "--dataset", "dataset", "dataset directory");
  key_option(eval, g, "--split", "split", "train, val or test");
  key_option(eval, g, "--out", "out", "output prefix for <prefix>.txt and <prefix>.json");

  auto* bench = app.add_subcommand("bench", "time the model scan against the rule checker");
  key_option(bench, g, "--model", "model", "model file");
  key_option(bench, g, "--layout", "layout", "layout file");
  key_option(bench, g, "--reps", "reps", "repetitions (median is reported)");
  key_option(bench, g, "--out", "out", "also write the report here");

  int inject_groups = 0;
  auto* synth = app.add_subcommand("synth", "write a synthetic layout");
  key_option(synth, g, "--out", "out", "layout file");
  key_option(synth, g, "--extent-x", "extent_x", "width in nm");
  key_option(synth, g, "--extent-y", "extent_y", "height in nm");
  key_option(synth, g, "--rules", "rules", "rules to inject: 1 or 3");
  synth->add_option("--inject", inject_groups, "violation clusters to inject")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) return cmd_gen(g);
    if (*train) return cmd_train(g, history);
    if (*oracle) return cmd_oracle(g);
    if (*check) return cmd_check(g);
    if (*eval) return cmd_eval(g);
    if (*bench) return cmd_bench(g);
    if (*synth) return cmd_synth(g, inject_groups);
  } catch (const std::exception& e) {
    std::cerr << "drcnet: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
