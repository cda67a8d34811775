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

#include "drcnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drcnet/errors.hpp"
#include "drcnet/parallel.hpp"

namespace drcnet::nn {
namespace {

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

void add_into(Gradients& acc, const Gradients& g) {
  for (std::size_t t = 0; t < acc.size(); ++t) {
    float* a = acc[t].data();
    const float* b = g[t].data();
    for (std::size_t i = 0; i < acc[t].size(); ++i) a[i] += b[i];
  }
}

}  // namespace

ModelSpec ModelSpec::preset(Preset p) {
  ModelSpec s;
  if (p == Preset::kOneRule) {
    s.stages = {{32}, {16}, {16}, {32}};
    s.output_dim = 2;
  } else {
    s.stages = {{16}, {32}, {32}, {64}};
    // An 8-way output layer of 2,056 = 8 * (256 + 1) parameters needs a
    // 256-wide hidden layer.
    s.fc_size = 256;
    s.output_dim = 8;
  }
  return s;
}

std::pair<int, int> ModelSpec::stage_input_extent(std::size_t i) const {
  int h = input_h, w = input_w;
  for (std::size_t s = 0; s < i && s < stages.size(); ++s) {
    h = kernels::conv_out_extent(h, stages[s].padding) / 2;
    w = kernels::conv_out_extent(w, stages[s].padding) / 2;
  }
  return {h, w};
}

int ModelSpec::stage_input_channels(std::size_t i) const { return i == 0 ? input_c : stages[i - 1].filters; }

int ModelSpec::flat_size() const {
  const auto [h, w] = stage_input_extent(stages.size());
  return h * w * stage_input_channels(stages.size());
}

void ModelSpec::validate() const {
  if (input_h <= 0 || input_w <= 0 || input_c <= 0) throw SpecError("input extents must be positive");
  if (fc_size <= 0) throw SpecError("fc size must be positive");
  if (output_dim < 2) throw SpecError("output dimension must be at least 2");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i].filters <= 0) throw SpecError("stage " + std::to_string(i + 1) + " needs a positive filter count");
    const auto [h, w] = stage_input_extent(i);
    const int oh = kernels::conv_out_extent(h, stages[i].padding);
    const int ow = kernels::conv_out_extent(w, stages[i].padding);
    if (oh < 2 || ow < 2) throw SpecError("stage " + std::to_string(i + 1) + " output is too small to pool");
  }
}

void TrainConfig::validate() const {
  if (!(decay > 0.0f && decay < 1.0f)) throw SpecError("decay must lie in (0, 1)");
  if (!(learning_rate > 0.0f)) throw SpecError("learning rate must be positive");
  if (!(epsilon > 0.0f)) throw SpecError("epsilon must be positive");
  if (batch_size <= 0) throw SpecError("batch size must be positive");
  if (epochs < 0) throw SpecError("epochs must be non-negative");
  if (init != "he_uniform") throw SpecError("unknown init scheme '" + init + "'");
}

Model::Model(ModelSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  auto add = [&](std::string name, std::vector<std::size_t> shape) {
    Tensor t(shape);
    info_.push_back({std::move(name), shape, t.size()});
    rms_.emplace_back(shape);
    params_.push_back(std::move(t));
  };
  for (std::size_t i = 0; i < spec_.stages.size(); ++i) {
    const std::string base = "conv" + std::to_string(i + 1);
    add(base + ".weight", {sz(spec_.stages[i].filters), 3, 3, sz(spec_.stage_input_channels(i))});
    add(base + ".bias", {sz(spec_.stages[i].filters)});
  }
  add("fc.weight", {sz(spec_.fc_size), sz(spec_.flat_size())});
  add("fc.bias", {sz(spec_.fc_size)});
  add("out.weight", {sz(spec_.output_dim), sz(spec_.fc_size)});
  add("out.bias", {sz(spec_.output_dim)});
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : params_) n += t.size();
  return n;
}

std::vector<std::pair<std::string, std::size_t>> Model::layer_parameter_counts() const {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (std::size_t i = 0; i + 1 < info_.size(); i += 2) {
    const std::string& name = info_[i].name;
    out.emplace_back(name.substr(0, name.find('.')), info_[i].count + info_[i + 1].count);
  }
  return out;
}

Model build_model(const ModelSpec& spec, Rng& rng) {
  Model m(spec);
  for (std::size_t t = 0; t < m.params().size(); ++t) {
    const auto& shape = m.param_info()[t].shape;
    if (shape.size() == 1) continue;  // biases start at zero
    const std::size_t fan_in = shape_size(std::span(shape).subspan(1));
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (float& v : m.params()[t].values()) v = static_cast<float>(rng.uniform_real(-limit, limit));
  }
  return m;
}

Model build_model(Preset preset, Rng& rng) { return build_model(ModelSpec::preset(preset), rng); }

Gradients zero_gradients(const Model& model) {
  Gradients g;
  g.reserve(model.params().size());
  for (const auto& p : model.params()) g.emplace_back(p.shape());
  return g;
}

Workspace::Workspace(const ModelSpec& spec) {
  input_.resize(sz(spec.input_h) * sz(spec.input_w) * sz(spec.input_c));
  for (std::size_t i = 0; i < spec.stages.size(); ++i) {
    Stage s{};
    std::tie(s.h, s.w) = spec.stage_input_extent(i);
    s.c = spec.stage_input_channels(i);
    s.f = spec.stages[i].filters;
    s.oh = kernels::conv_out_extent(s.h, spec.stages[i].padding);
    s.ow = kernels::conv_out_extent(s.w, spec.stages[i].padding);
    s.geom = kernels::conv_geometry(s.h, s.w, s.c, s.f, spec.stages[i].padding);
    const std::size_t pixels = sz(s.oh) * sz(s.ow);
    s.src.resize(s.geom.src_pixels() * sz(s.c));
    s.ext.resize(s.geom.ext_pixels() * sz(s.f));
    s.act.resize(pixels * sz(s.f));
    s.grad_act.resize(s.act.size());
    s.pooled.resize(sz(s.oh / 2) * sz(s.ow / 2) * sz(s.f));
    s.argmax.resize(s.pooled.size());
    if (i > 0) {
      s.grad_src.resize(s.src.size());
      s.grad_in.resize(sz(s.h) * sz(s.w) * sz(s.c));
    }
    stages_.push_back(std::move(s));
  }
  hidden_.resize(sz(spec.fc_size));
  grad_hidden_.resize(hidden_.size());
  logits_.resize(sz(spec.output_dim));
  probs_.resize(logits_.size());
  grad_logits_.resize(logits_.size());
  grad_flat_.resize(sz(spec.flat_size()));
}

void forward(const Model& model, Workspace& ws) {
  const ModelSpec& spec = model.spec();
  const auto& p = model.params();
  const float* src = ws.input_.data();
  for (std::size_t i = 0; i < ws.stages_.size(); ++i) {
    auto& s = ws.stages_[i];
    kernels::conv_pad(src, s.geom, s.src.data());
    kernels::conv_forward(s.src.data(), s.geom, p[2 * i].data(), p[2 * i + 1].data(), s.ext.data(), s.act.data());
    kernels::relu_inplace(s.act.data(), s.act.size());
    kernels::maxpool_forward(s.act.data(), s.oh, s.ow, s.f, s.pooled.data(), s.argmax.data());
    src = s.pooled.data();
  }
  const std::size_t fc = 2 * ws.stages_.size();
  kernels::dense_forward(src, spec.flat_size(), p[fc].data(), p[fc + 1].data(), spec.fc_size, ws.hidden_.data());
  kernels::relu_inplace(ws.hidden_.data(), ws.hidden_.size());
  kernels::dense_forward(ws.hidden_.data(), spec.fc_size, p[fc + 2].data(), p[fc + 3].data(), spec.output_dim,
                         ws.logits_.data());
  kernels::softmax(ws.logits_.data(), spec.output_dim, ws.probs_.data());
  ws.has_forward_ = true;
}

double backward(const Model& model, Workspace& ws, std::size_t target, Gradients& grads) {
  if (!ws.has_forward_) throw StateError("backward called without a cached forward pass");
  const ModelSpec& spec = model.spec();
  if (target >= sz(spec.output_dim)) throw LabelSpaceMismatch("target class outside the model's output range");
  const auto& p = model.params();
  const std::size_t fc = 2 * ws.stages_.size();

  const double loss = -std::log(std::max(static_cast<double>(ws.probs_[target]), kProbabilityFloor));
  // Softmax + cross-entropy: dE/dlogits = p - y.
  for (std::size_t k = 0; k < ws.probs_.size(); ++k)
    ws.grad_logits_[k] = ws.probs_[k] - (k == target ? 1.0f : 0.0f);

  kernels::dense_backward(ws.hidden_.data(), spec.fc_size, p[fc + 2].data(), spec.output_dim,
                          ws.grad_logits_.data(), grads[fc + 2].data(), grads[fc + 3].data(),
                          ws.grad_hidden_.data());
  kernels::relu_mask(ws.hidden_.data(), ws.grad_hidden_.data(), ws.grad_hidden_.size());
  const float* flat = ws.stages_.empty() ? ws.input_.data() : ws.stages_.back().pooled.data();
  kernels::dense_backward(flat, spec.flat_size(), p[fc].data(), spec.fc_size, ws.grad_hidden_.data(),
                          grads[fc].data(), grads[fc + 1].data(), ws.grad_flat_.data());

  for (std::size_t i = ws.stages_.size(); i-- > 0;) {
    auto& s = ws.stages_[i];
    const float* dpooled = i + 1 == ws.stages_.size() ? ws.grad_flat_.data() : ws.stages_[i + 1].grad_in.data();
    std::fill(s.grad_act.begin(), s.grad_act.end(), 0.0f);
    kernels::maxpool_backward_add(dpooled, s.argmax.data(), s.pooled.size(), s.grad_act.data());
    kernels::relu_mask(s.act.data(), s.grad_act.data(), s.grad_act.size());
    kernels::conv_backward(s.src.data(), s.geom, p[2 * i].data(), s.grad_act.data(), s.ext.data(),
                           grads[2 * i].data(), grads[2 * i + 1].data(), i > 0 ? s.grad_src.data() : nullptr,
                           i > 0 ? s.grad_in.data() : nullptr);
  }
  return loss;
}

BatchResult batch_gradients(const Model& model, std::span<const BitImage* const> images,
                            std::span<const std::size_t> targets, int threads, std::vector<Workspace>& workspaces) {
  if (images.size() != targets.size()) throw ShapeMismatch("images and targets differ in length");
  const ModelSpec& spec = model.spec();
  for (const BitImage* img : images)
    if (img->width() != spec.input_w || img->height() != spec.input_h || spec.input_c != 1)
      throw ShapeMismatch("clip size does not match the model input");
  const std::size_t n = images.size();
  const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), n));
  while (workspaces.size() < static_cast<std::size_t>(std::max(1, workers))) workspaces.emplace_back(spec);

  BatchResult result{zero_gradients(model), 0.0};
  if (n == 0) return result;
  if (workers <= 1) {
    Gradients scratch = zero_gradients(model);
    for (std::size_t i = 0; i < n; ++i) {
      Workspace& ws = workspaces[0];
      images[i]->to_floats(ws.input().data());
      forward(model, ws);
      result.loss_sum += backward(model, ws, targets[i], scratch);
      add_into(result.gradients, scratch);
    }
  } else {
    std::vector<Gradients> per_sample(n);
    std::vector<double> losses(n);
    parallel_for_workers(n, workers, [&](std::size_t i, int worker) {
      Workspace& ws = workspaces[static_cast<std::size_t>(worker)];
      per_sample[i] = zero_gradients(model);
      images[i]->to_floats(ws.input().data());
      forward(model, ws);
      losses[i] = backward(model, ws, targets[i], per_sample[i]);
    });
    for (std::size_t i = 0; i < n; ++i) {
      result.loss_sum += losses[i];
      add_into(result.gradients, per_sample[i]);
    }
  }
  const float inv = 1.0f / static_cast<float>(n);
  for (auto& g : result.gradients)
    for (float& v : g.values()) v *= inv;
  return result;
}

void rmsprop_step(Model& model, const Gradients& grads, const TrainConfig& cfg) {
  const float alpha = cfg.decay;
  const float step = cfg.decay * cfg.learning_rate;
  for (std::size_t t = 0; t < model.params().size(); ++t) {
    float* w = model.params()[t].data();
    float* sq = model.rms()[t].data();
    const float* g = grads[t].data();
    for (std::size_t i = 0; i < model.params()[t].size(); ++i) {
      sq[i] = alpha * sq[i] + (1.0f - alpha) * g[i] * g[i];
      w[i] -= step / std::sqrt(sq[i] + cfg.epsilon) * g[i];
    }
  }
}

std::size_t argmax(std::span<const float> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

Prediction predict(const Model& model, const BitImage& image, Workspace& ws) {
  const ModelSpec& spec = model.spec();
  if (image.width() != spec.input_w || image.height() != spec.input_h || spec.input_c != 1)
    throw ShapeMismatch("image is " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                        ", model expects " + std::to_string(spec.input_w) + "x" + std::to_string(spec.input_h));
  image.to_floats(ws.input().data());
  forward(model, ws);
  Prediction out;
  out.probs = Tensor({ws.probs().size()}, std::vector<float>(ws.probs().begin(), ws.probs().end()));
  out.class_index = argmax(ws.probs());
  if (spec.output_dim == 2 || spec.output_dim == 8)
    out.label = class_labels(model.label_space())[out.class_index];
  return out;
}

Prediction predict(const Model& model, const BitImage& image) {
  Workspace ws(model.spec());
  return predict(model, image, ws);
}

}  // namespace drcnet::nn
