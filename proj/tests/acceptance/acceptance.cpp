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

// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// non-zero when any selected criterion fails.
//
//   drcnet_acceptance [--only N]... [--work DIR] [--cli PATH] [--threads N]

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "boundary_cases.hpp"
#include "drcnet/forge.hpp"
#include "drcnet/geometry.hpp"
#include "drcnet/metrics.hpp"
#include "drcnet/model.hpp"
#include "drcnet/model_io.hpp"
#include "drcnet/rng.hpp"
#include "drcnet/train.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace drcnet;

namespace {

struct Context {
  fs::path work;
  std::string cli;
  int threads = 0;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void note(const std::string& s) {
  std::printf("      %s\n", s.c_str());
  std::fflush(stdout);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---- 1 ---------------------------------------------------------------------

Outcome oracle_boundaries(Context&) {
  const auto t0 = Clock::now();
  const auto cases = testing::boundary_cases();
  std::vector<std::string> wrong;
  for (const auto& c : cases)
    if (testing::as_naive(run_drc(testing::boundary_layout(c), RuleSet{}).violations) != c.expected)
      wrong.push_back(c.name);
  const double s = seconds_since(t0);
  std::string names;
  for (const auto& w : wrong) names += " " + w;
  return {wrong.empty() && cases.size() >= 20 && s < 1.0,
          fmt("%zu layouts, %zu mismatched%s, %.3f s (limit 1 s)", cases.size(), wrong.size(), names.c_str(), s)};
}

// ---- 2 ---------------------------------------------------------------------

Outcome oracle_bruteforce(Context&) {
  const auto t0 = Clock::now();
  Rng rng(0xB2F0);
  std::size_t mismatched = 0, violations = 0;
  for (int i = 0; i < 200; ++i) {
    const auto shapes = testing::random_shapes(rng, static_cast<std::size_t>(rng.uniform_int(1, 20)));
    const auto expected = testing::naive_drc(shapes, RuleSet{});
    violations += expected.size();
    if (testing::as_naive(run_drc(Layout("r", shapes), RuleSet{}).violations) != expected) ++mismatched;
  }
  const double s = seconds_since(t0);
  return {mismatched == 0 && s < 10.0,
          fmt("200 random layouts (%zu violations), %zu mismatched, %.3f s (limit 10 s)", violations, mismatched, s)};
}

// ---- 3 ---------------------------------------------------------------------

Outcome parameter_counts(Context&) {
  Rng rng(1);
  const auto one = nn::build_model(nn::Preset::kOneRule, rng).layer_parameter_counts();
  const auto three = nn::build_model(nn::Preset::kThreeRule, rng).layer_parameter_counts();
  const std::vector<std::size_t> want_one = {320, 4624, 2320, 4640, 258};
  const std::vector<std::size_t> want_three = {160, 4640, 9248, 18496, 2056};
  auto pick = [](const auto& counts) {
    return std::vector<std::size_t>{counts[0].second, counts[1].second, counts[2].second, counts[3].second,
                                    counts[5].second};
  };
  const bool ok = pick(one) == want_one && pick(three) == want_three;
  auto show = [](const auto& counts) {
    std::string s;
    for (const auto& [name, n] : counts) s += fmt(" %s=%zu", name.c_str(), n);
    return s;
  };
  return {ok, "one_rule" + show(one) + "; three_rule" + show(three) +
                  " (fc sizes follow the flattened 12x12 feature map)"};
}

// ---- 4 ---------------------------------------------------------------------

Outcome gradient_check(Context&) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string where;
  std::size_t checked = 0, skipped = 0;
  bool skip_ok = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = testing::gradient_check(seed, 1e-3);
    if (r.worst > worst) {
      worst = r.worst;
      where = fmt("seed %llu %s", static_cast<unsigned long long>(seed), r.worst_param.c_str());
    }
    checked += r.checked;
    skipped += r.skipped;
    skip_ok &= r.skipped * 10 < r.checked;
  }
  const double s = seconds_since(t0);
  return {worst < 1e-2 && skip_ok && s < 60.0,
          fmt("20 models, %zu parameters compared (%zu straddling a kink skipped), max relative error %.3g (%s), "
              "%.1f s (limit 60 s)",
              checked, skipped, worst, where.c_str(), s)};
}

// ---- shared training helpers -------------------------------------------------

nn::ClipSet clip_set(const Corpus& c, Split split) { return nn::select_split(c.manifest, c.images, split); }

ConfusionMatrix held_out_confusion(const nn::Model& m, const Corpus& c, int threads) {
  const nn::ClipSet test = clip_set(c, Split::kTest);
  const nn::EvalResult ev = nn::evaluate(m, test, threads);
  const auto classes = class_labels(c.manifest.label_space);
  std::vector<ClipLabel> pred, truth;
  for (std::size_t i = 0; i < test.size(); ++i) {
    pred.push_back(classes[ev.predictions[i]]);
    truth.push_back(classes[test.targets[i]]);
  }
  return confusion(pred, truth, classes);
}

nn::TrainOptions budgeted(int threads, Clock::time_point start, double budget_s) {
  nn::TrainOptions o;
  o.threads = threads;
  o.keep_best = true;
  o.on_epoch = [](const nn::EpochRecord& r) {
    note(fmt("epoch %2d  train_loss %.4f  val_loss %.4f  val_acc %.4f  %.0f s", r.epoch, r.train_loss, r.val_loss,
             r.val_accuracy, r.seconds));
  };
  // Stop before an epoch that would not finish inside the budget.
  o.stop = [start, budget_s](const nn::EpochRecord& r) { return seconds_since(start) + 1.15 * r.seconds > budget_s; };
  return o;
}

// ---- 5 ---------------------------------------------------------------------

Outcome capacity(Context& ctx) {
  const auto t0 = Clock::now();
  ForgeConfig fc;
  fc.seed = 5;
  fc.seeds = 4;
  fc.variants = 6;
  fc.label_space = LabelSpace::kOneRule;
  const Corpus corpus = forge_corpus(fc, ctx.threads);
  nn::ClipSet tiny;
  for (std::size_t i = 0; i < corpus.images.size() && tiny.size() < 32; ++i) {
    tiny.images.push_back(corpus.images[i]);
    tiny.targets.push_back(class_index(LabelSpace::kOneRule, corpus.manifest.entries[i].label));
  }
  Rng rng(55);
  nn::Model m = nn::build_model(nn::Preset::kOneRule, rng);
  nn::TrainConfig cfg;
  cfg.epochs = 200;
  cfg.seed = 55;
  nn::TrainOptions opts;
  opts.threads = ctx.threads;
  const auto history = nn::train(m, tiny, nn::ClipSet{}, cfg, opts);
  const double final_loss = history.epochs.back().train_loss;
  const double s = seconds_since(t0);
  return {tiny.size() == 32 && final_loss < 0.01 && s < 120.0,
          fmt("32 clips, 200 epochs, final mean train loss %.5f (limit 0.01), %.1f s (limit 120 s)", final_loss, s)};
}

// ---- 6 ---------------------------------------------------------------------

Outcome one_rule_recall(Context& ctx) {
  const auto t0 = Clock::now();
  constexpr double kBudget = 30 * 60;
  ForgeConfig fc;
  fc.seed = 1;
  fc.seeds = 50;
  fc.variants = 45;
  fc.label_space = LabelSpace::kOneRule;
  const Corpus corpus = forge_corpus(fc, ctx.threads);
  const auto counts = corpus.manifest.counts();
  note(fmt("corpus: %zu clips (NDRC %zu, DRC1 %zu), train %zu / val %zu / test %zu, %.1f s",
           corpus.manifest.entries.size(), counts.at(ClipLabel::kNdrc), counts.at(ClipLabel::kDrc1),
           corpus.manifest.count(Split::kTrain), corpus.manifest.count(Split::kVal),
           corpus.manifest.count(Split::kTest), seconds_since(t0)));

  Rng rng = Rng::derive(fc.seed, 0x1417);
  nn::Model m = nn::build_model(nn::Preset::kOneRule, rng);
  nn::TrainConfig cfg;
  cfg.epochs = 30;
  cfg.seed = fc.seed;
  // Leave room for the held-out evaluation after the last epoch.
  const auto history = nn::train(m, clip_set(corpus, Split::kTrain), clip_set(corpus, Split::kVal), cfg,
                                 budgeted(ctx.threads, t0, kBudget - 60));
  const ConfusionMatrix cm = held_out_confusion(m, corpus, ctx.threads);
  const EvalReport r = make_eval_report(cm, "test");
  const double s = seconds_since(t0);

  fs::create_directories(ctx.work);
  nn::save_model(ctx.work / "one_rule.bin", m, {{"preset", "one_rule"}});
  {
    std::ofstream out(ctx.work / "one_rule_eval.txt");
    write_eval_text(out, r);
    nn::write_history(ctx.work / "one_rule_history.csv", history, {{"preset", "one_rule"}}, true);
  }
  const bool ok = corpus.manifest.entries.size() >= 20000 && r.recall.defined && r.recall.value >= 0.85 &&
                  r.fnr.value <= 0.15 && s <= kBudget;
  return {ok, fmt("%zu clips, %zu epochs (kept %d), test recall %.4f (>= 0.85), fnr %.4f (<= 0.15), fpr %.4f, "
                  "TP %llu FN %llu TN %llu FP %llu, %.1f min (limit 30)",
                  corpus.manifest.entries.size(), history.epochs.size(), history.kept_epoch, r.recall.value, r.fnr.value, r.fpr.value,
                  static_cast<unsigned long long>(r.binary.tp), static_cast<unsigned long long>(r.binary.fn),
                  static_cast<unsigned long long>(r.binary.tn), static_cast<unsigned long long>(r.binary.fp),
                  s / 60)};
}

// ---- 7 ---------------------------------------------------------------------

Outcome three_rule_diagonal(Context& ctx) {
  const auto t0 = Clock::now();
  constexpr double kBudget = 50 * 60;
  ForgeConfig fc;
  fc.seed = 3;
  fc.seeds = 50;
  fc.variants = 300;
  fc.label_space = LabelSpace::kThreeRule;
  fc.inject.groups = 8;
  fc.per_class_cap = 1500;
  fc.skip_partial = true;
  const Corpus corpus = forge_corpus(fc, ctx.threads);
  std::string hist;
  for (const auto& [label, n] : corpus.manifest.counts()) hist += fmt(" %s=%zu", label_name(label).data(), n);
  note(fmt("corpus: %zu clips,%s, %.1f s", corpus.manifest.entries.size(), hist.c_str(), seconds_since(t0)));

  Rng rng = Rng::derive(fc.seed, 0x1417);
  nn::Model m = nn::build_model(nn::Preset::kThreeRule, rng);
  nn::TrainConfig cfg;
  cfg.epochs = 30;
  cfg.seed = fc.seed;
  const auto history = nn::train(m, clip_set(corpus, Split::kTrain), clip_set(corpus, Split::kVal), cfg,
                                 budgeted(ctx.threads, t0, kBudget - 60));
  const ConfusionMatrix cm = held_out_confusion(m, corpus, ctx.threads);
  const EvalReport r = make_eval_report(cm, "test");
  std::ostringstream text;
  write_eval_text(text, r);
  fs::create_directories(ctx.work);
  std::ofstream(ctx.work / "three_rule_eval.txt") << text.str();
  nn::write_history(ctx.work / "three_rule_history.csv", history, {{"preset", "three_rule"}}, true);
  std::istringstream lines(text.str());
  for (std::string line; std::getline(lines, line);)
    if (!line.empty() && line[0] != '#') note(line);

  std::string weak;
  for (std::size_t i = 0; i < cm.size(); ++i)
    for (std::size_t j = 0; j < cm.size(); ++j)
      if (i != j && cm.at(i, j) >= cm.at(i, i)) {
        weak += fmt(" %s", label_name(cm.classes[i]).data());
        break;
      }
  return {cm.diagonal_dominant(),
          fmt("%zu held-out clips, %zu epochs (kept %d), accuracy %.4f, diagonal %s%s, %.1f min",
              static_cast<std::size_t>(cm.total()), history.epochs.size(), history.kept_epoch, r.accuracy,
              cm.diagonal_dominant() ? "strictly dominant in every row" : "not dominant in rows", weak.c_str(),
              seconds_since(t0) / 60)};
}

// ---- 8 ---------------------------------------------------------------------

int run(const std::string& cmd) {
  const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
  return rc;
}

Outcome benchmark(Context& ctx) {
  fs::create_directories(ctx.work);
  const fs::path layout = ctx.work / "bench_5000.lyt";
  fs::path model = ctx.work / "one_rule.bin";
  std::string origin = "trained one_rule model";
  if (!fs::exists(model)) {
    model = ctx.work / "bench_untrained.bin";
    Rng rng(8);
    nn::save_model(model, nn::build_model(nn::Preset::kOneRule, rng));
    origin = "untrained one_rule model (criterion 6 has not run)";
  }
  const std::string cli = ctx.cli + " --threads " + std::to_string(ctx.threads) + " --seed 8 ";
  if (run(cli + "synth --rules 3 --inject 30 --extent-x 5000 --extent-y 5000 --out " + layout.string()) != 0)
    return {false, "synth failed"};
  const fs::path report = ctx.work / "bench.txt";
  if (run(cli + "bench --reps 3 --model " + model.string() + " --layout " + layout.string() + " --out " +
          report.string()) != 0)
    return {false, "bench failed"};
  std::map<std::string, double> kv;
  std::istringstream in(slurp(report));
  for (std::string line; std::getline(in, line);) {
    std::istringstream ls(line);
    std::string key;
    double v;
    if (ls >> key >> v) kv[key] = v;
  }
  for (const char* key : {"cnn_ms", "oracle_ms", "ratio", "windows", "reps"})
    if (!kv.count(key)) return {false, fmt("report lacks %s", key)};
  const double wps = 1000.0 * kv["windows"] / kv["cnn_ms"];
  const bool ratio_ok = std::abs(kv["ratio"] - kv["oracle_ms"] / kv["cnn_ms"]) <= 1e-3 * std::max(1.0, kv["ratio"]);
  const bool ok = kv["windows"] >= 1000 && kv["reps"] == 3 && kv["cnn_ms"] > 0 && kv["oracle_ms"] > 0 && ratio_ok &&
                  wps >= 100;
  return {ok, fmt("%s, %.0f windows, cnn %.1f ms, oracle %.1f ms, ratio %.4f, %.0f windows/s (>= 100), median of %.0f",
                  origin.c_str(), kv["windows"], kv["cnn_ms"], kv["oracle_ms"], kv["ratio"], wps, kv["reps"])};
}

// ---- 9 ---------------------------------------------------------------------

Outcome determinism(Context& ctx) {
  const auto t0 = Clock::now();
  auto pipeline = [&](const fs::path& dir, int threads) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = ctx.cli + " --seed 11 --threads " + std::to_string(threads) + " ";
    const std::string data = (dir / "data").string(), model = (dir / "model.bin").string();
    return run(cli + "gen --seeds 6 --variants 10 --rules 1 --out " + data) == 0 &&
           run(cli + "train --epochs 2 --dataset " + data + " --out " + model) == 0 &&
           run(cli + "eval --split test --model " + model + " --dataset " + data + " --out " + (dir / "eval").string()) ==
               0;
  };
  const fs::path a = ctx.work / "determinism_t1", b = ctx.work / "determinism_t3";
  if (!pipeline(a, 1) || !pipeline(b, 3)) return {false, "pipeline command failed"};

  std::vector<fs::path> files = {"data/manifest.csv", "model.bin", "eval.txt", "eval.json"};
  for (const auto& e : fs::recursive_directory_iterator(a / "data" / "clips"))
    files.push_back(fs::relative(e.path(), a));
  std::size_t differ = 0;
  std::string first;
  for (const auto& f : files)
    if (!fs::exists(b / f) || slurp(a / f) != slurp(b / f)) {
      if (first.empty()) first = f.string();
      ++differ;
    }
  return {differ == 0 && files.size() > 4,
          fmt("gen -> train -> eval with --threads 1 and 3: %zu files compared (manifest, %zu clips, model, "
              "eval reports), %zu differ%s%s, %.1f s",
              files.size(), files.size() - 4, differ, first.empty() ? "" : ", first ", first.c_str(),
              seconds_since(t0))};
}

// ---- 10 --------------------------------------------------------------------

Outcome metric_identities(Context&) {
  Rng rng(0x10);
  std::size_t violations = 0, checked = 0;
  auto in_unit = [](const Metric& m) { return m.value >= 0.0 && m.value <= 1.0; };
  for (int trial = 0; trial < 1000; ++trial) {
    const LabelSpace space = trial % 2 ? LabelSpace::kThreeRule : LabelSpace::kOneRule;
    const auto cls = class_labels(space);
    ConfusionMatrix cm{{cls.begin(), cls.end()}, {}};
    const std::int64_t hi = trial % 10 == 0 ? 2 : 60;  // sparse matrices hit zero denominators
    for (std::size_t i = 0; i < cls.size(); ++i) {
      cm.counts.emplace_back();
      for (std::size_t j = 0; j < cls.size(); ++j)
        cm.counts.back().push_back(static_cast<std::uint64_t>(std::max<std::int64_t>(0, rng.uniform_int(-hi / 2, hi))));
    }
    const BinaryCounts b = binary_collapse(cm);
    const EvalReport r = make_eval_report(cm);
    bool ok = b.total() == cm.total();
    ok &= b.tn == cm.at(0, 0) && b.tn + b.fp == cm.row_total(0);
    ok &= in_unit(r.recall) && in_unit(r.precision) && in_unit(r.fnr) && in_unit(r.fpr) && r.accuracy >= 0 &&
          r.accuracy <= 1;
    if (b.tp + b.fn > 0) {
      ok &= r.recall.defined && r.fnr.defined && std::abs(r.recall.value + r.fnr.value - 1.0) < 1e-12;
      ok &= r.recall.value == static_cast<double>(b.tp) / static_cast<double>(b.tp + b.fn);
    } else {
      ok &= !r.recall.defined && !r.fnr.defined;
    }
    if (b.fp + b.tn > 0)
      ok &= r.fpr.defined &&
            std::abs(r.fpr.value - (1.0 - static_cast<double>(b.tn) / static_cast<double>(b.fp + b.tn))) < 1e-12;
    for (const auto& c : r.per_class) ok &= in_unit(c.recall) && in_unit(c.precision);
    ++checked;
    violations += !ok;
  }
  return {violations == 0, fmt("%zu random matrices (d = 2 and 8), %zu identity violations", checked, violations)};
}

struct Criterion {
  int id;
  const char* title;
  Outcome (*run)(Context&);
};

const Criterion kCriteria[] = {
    {1, "oracle boundary exactness", oracle_boundaries},
    {2, "brute-force oracle equivalence", oracle_bruteforce},
    {3, "preset parameter counts", parameter_counts},
    {4, "gradient check", gradient_check},
    {5, "capacity sanity", capacity},
    {6, "one-rule recall", one_rule_recall},
    {7, "three-rule diagonal dominance", three_rule_diagonal},
    {8, "benchmark report", benchmark},
    {9, "end-to-end determinism", determinism},
    {10, "metric identities", metric_identities},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drcnet acceptance criteria"};
  std::vector<int> only;
  Context ctx;
  ctx.work = fs::temp_directory_path() / "drcnet_acceptance";
  ctx.cli = "drcnet";
  app.add_option("--only", only, "criterion numbers to run (default: all)");
  std::string work;
  app.add_option("--work", work, "scratch directory");
  app.add_option("--cli", ctx.cli, "path to the drcnet executable");
  app.add_option("--threads", ctx.threads, "worker threads (0: all cores)");
  CLI11_PARSE(app, argc, argv);
  if (!work.empty()) ctx.work = work;

  int failed = 0;
  for (const Criterion& c : kCriteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
