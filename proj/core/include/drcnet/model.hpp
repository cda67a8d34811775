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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "drcnet/image.hpp"
#include "drcnet/labels.hpp"
#include "drcnet/layers.hpp"
#include "drcnet/rng.hpp"
#include "drcnet/tensor.hpp"

namespace drcnet::nn {

struct StageSpec {
  int filters = 0;  // 3x3 kernels, followed by ReLU and 2x2 max pooling
  Padding padding = Padding::kSame;
  friend bool operator==(const StageSpec&, const StageSpec&) = default;
};

enum class Preset : std::uint8_t { kOneRule, kThreeRule };

struct ModelSpec {
  int input_h = 200;
  int input_w = 200;
  int input_c = 1;
  std::vector<StageSpec> stages;
  int fc_size = 128;
  int output_dim = 2;

  // Layer stacks of the two reference detectors: 1 rule (d = 2) and
  // 3 rules (d = 8), 200x200 single-channel input, four conv/pool stages.
  static ModelSpec preset(Preset p);

  // Throws SpecError when a stage would pool below 1x1 or a count is not positive.
  void validate() const;

  // Spatial size entering stage i (i == stages.size() gives the flattened map).
  std::pair<int, int> stage_input_extent(std::size_t i) const;
  int stage_input_channels(std::size_t i) const;
  int flat_size() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct TrainConfig {
  float learning_rate = 0.001f;  // eta
  float decay = 0.9f;            // alpha
  float epsilon = 1e-8f;
  int batch_size = 32;
  int epochs = 20;
  std::uint64_t seed = 1;
  std::string init = "he_uniform";

  // Throws SpecError unless 0 < decay < 1, learning_rate > 0, epsilon > 0, batch_size > 0, epochs >= 0.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct ParamInfo {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t count = 0;
};

// Trainable detector: conv stages, one hidden dense layer (ReLU), and the
// output layer (softmax). Parameter tensors are held in declaration order
// conv1.weight, conv1.bias, ..., fc.weight, fc.bias, out.weight, out.bias;
// rms holds the RMSprop accumulators with identical shapes.
class Model {
 public:
  Model() = default;
  explicit Model(ModelSpec spec);  // zero-initialized weights

  const ModelSpec& spec() const { return spec_; }
  std::vector<Tensor>& params() { return params_; }
  const std::vector<Tensor>& params() const { return params_; }
  std::vector<Tensor>& rms() { return rms_; }
  const std::vector<Tensor>& rms() const { return rms_; }
  const std::vector<ParamInfo>& param_info() const { return info_; }

  std::size_t parameter_count() const;
  // Parameters per layer (weights + bias), in layer order: conv1..convN, fc, out.
  std::vector<std::pair<std::string, std::size_t>> layer_parameter_counts() const;

  LabelSpace label_space() const { return label_space_for_classes(static_cast<std::size_t>(spec_.output_dim)); }

  // Provenance carried into the model file.
  std::uint64_t seed = 0;
  TrainConfig train_config;

 private:
  ModelSpec spec_;
  std::vector<Tensor> params_;
  std::vector<Tensor> rms_;
  std::vector<ParamInfo> info_;
};

// Layers per spec with weights uniform in +-sqrt(6 / fan_in) drawn from rng in
// declaration order, biases zero.
Model build_model(const ModelSpec& spec, Rng& rng);
Model build_model(Preset preset, Rng& rng);

using Gradients = std::vector<Tensor>;
Gradients zero_gradients(const Model& model);

// Activation cache for one forward/backward pass. Not thread-safe; use one per
// worker.
class Workspace {
 public:
  explicit Workspace(const ModelSpec& spec);

  std::span<float> input() { return input_; }
  std::span<const float> logits() const { return logits_; }
  std::span<const float> probs() const { return probs_; }
  bool has_forward() const { return has_forward_; }

 private:
  friend void forward(const Model&, Workspace&);
  friend double backward(const Model&, Workspace&, std::size_t, Gradients&);

  struct Stage {
    int h, w, c, f, oh, ow;
    kernels::ConvGeometry geom;
    std::vector<float> src;  // zero-bordered stage input
    std::vector<float> ext;  // extended conv output / gradient scratch
    std::vector<float> act;  // conv + bias, after ReLU
    std::vector<float> pooled;
    std::vector<std::uint32_t> argmax;
    std::vector<float> grad_act;
    std::vector<float> grad_src;
    std::vector<float> grad_in;  // gradient w.r.t. the stage input (unused for stage 0)
  };
  std::vector<float> input_;
  std::vector<Stage> stages_;
  std::vector<float> hidden_, logits_, probs_;
  std::vector<float> grad_flat_, grad_hidden_, grad_logits_;
  bool has_forward_ = false;
};

// Runs the network on ws.input(); probabilities land in ws.probs().
void forward(const Model& model, Workspace& ws);

// Cross-entropy gradients of the cached forward pass against `target`,
// written (overwriting) into grads. Returns the sample loss. Throws StateError
// without a cached forward pass.
double backward(const Model& model, Workspace& ws, std::size_t target, Gradients& grads);

// Mean cross-entropy gradient over a batch of rasterized clips. Per-sample
// gradients are reduced in batch order, so the result is bit-identical for any
// thread count.
struct BatchResult {
  Gradients gradients;
  double loss_sum = 0.0;
};
BatchResult batch_gradients(const Model& model, std::span<const BitImage* const> images,
                            std::span<const std::size_t> targets, int threads,
                            std::vector<Workspace>& workspaces);

// RMSprop, applied literally:
//   S = alpha * S + (1 - alpha) * g^2
//   w = w - alpha * eta / sqrt(S + eps) * g
void rmsprop_step(Model& model, const Gradients& grads, const TrainConfig& cfg);

struct Prediction {
  Tensor probs;
  std::size_t class_index = 0;  // argmax, lowest index on ties
  ClipLabel label = ClipLabel::kNdrc;
};
Prediction predict(const Model& model, const BitImage& image);
Prediction predict(const Model& model, const BitImage& image, Workspace& ws);

// Lowest index of the maximum.
std::size_t argmax(std::span<const float> v);

}  // namespace drcnet::nn
