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


#include <benchmark/benchmark.h>

#include "drcnet/forge.hpp"
#include "drcnet/geometry.hpp"
#include "drcnet/model.hpp"
#include "drcnet/rng.hpp"
#include "drcnet/scan.hpp"

namespace {

using namespace drcnet;

Layout seed_layout(Coord extent) {
  SeedConfig cfg;
  cfg.extent_x = cfg.extent_y = extent;
  cfg.max_wires = static_cast<int>(extent / 5);
  // The wire target is drawn per seed; keep the densest of a few draws.
  Layout best;
  for (std::uint64_t seed = 42; seed < 58; ++seed) {
    Rng rng(seed);
    Layout layout = synth_seed(cfg, rng);
    if (layout.shapes().size() > best.shapes().size()) best = std::move(layout);
  }
  return best;
}

void BM_RunDrc(benchmark::State& state) {
  const Layout layout = seed_layout(static_cast<Coord>(state.range(0)));
  const RuleSet rules;
  for (auto _ : state) benchmark::DoNotOptimize(run_drc(layout, rules));
  state.counters["shapes"] = static_cast<double>(layout.shapes().size());
}
BENCHMARK(BM_RunDrc)->Arg(1000)->Arg(2000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Rasterize(benchmark::State& state) {
  const Layout layout = seed_layout(2000);
  const auto origins = window_origins(layout.extent_x(), layout.extent_y());
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rasterize(layout, origins[i++ % origins.size()]));
}
BENCHMARK(BM_Rasterize);

void BM_Forward(benchmark::State& state) {
  Rng rng(1);
  const nn::Model model = nn::build_model(static_cast<nn::Preset>(state.range(0)), rng);
  nn::Workspace ws(model.spec());
  for (float& v : ws.input()) v = rng.uniform01() < 0.3 ? 1.0f : 0.0f;
  for (auto _ : state) {
    nn::forward(model, ws);
    benchmark::DoNotOptimize(ws.probs().data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Forward)
    ->Arg(static_cast<int>(nn::Preset::kOneRule))
    ->Arg(static_cast<int>(nn::Preset::kThreeRule))
    ->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  Rng rng(2);
  const nn::Model model = nn::build_model(static_cast<nn::Preset>(state.range(0)), rng);
  nn::Workspace ws(model.spec());
  nn::Gradients grads = nn::zero_gradients(model);
  for (float& v : ws.input()) v = rng.uniform01() < 0.3 ? 1.0f : 0.0f;
  for (auto _ : state) {
    nn::forward(model, ws);
    benchmark::DoNotOptimize(nn::backward(model, ws, 1, grads));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ForwardBackward)
    ->Arg(static_cast<int>(nn::Preset::kOneRule))
    ->Arg(static_cast<int>(nn::Preset::kThreeRule))
    ->Unit(benchmark::kMillisecond);

void BM_ScanLayout(benchmark::State& state) {
  Rng rng(3);
  const nn::Model model = nn::build_model(nn::Preset::kOneRule, rng);
  const Layout layout = seed_layout(1000);
  for (auto _ : state) benchmark::DoNotOptimize(scan_layout(model, layout));
}
BENCHMARK(BM_ScanLayout)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
