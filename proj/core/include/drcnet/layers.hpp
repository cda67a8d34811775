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
#include <vector>

#include "drcnet/tensor.hpp"

namespace drcnet::nn {

enum class Padding : std::uint8_t { kSame, kValid };

// Multi-channel 3x3 correlation plus per-filter bias.
//   input   [H, W, Cin]
//   kernels [F, 3, 3, Cin]
//   bias    [F]
//   output  [H', W', F]; H' = H for kSame (zero padding), H - 2 for kValid.
Tensor conv2d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias, Padding padding);

struct Conv2dGrads {
  Tensor input;  // empty unless requested
  Tensor kernels;
  Tensor bias;
};
Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& kernels, const Tensor& grad_output, Padding padding,
                            bool want_input_grad = true);

Tensor relu(const Tensor& t);
// Gradient through ReLU given its output.
Tensor relu_backward(const Tensor& output, const Tensor& grad_output);

struct PoolResult {
  Tensor output;                     // [floor(H/2), floor(W/2), C]
  std::vector<std::uint32_t> argmax;  // flat input index of each output's maximum
};
// 2x2 max pooling, stride 2; an odd trailing row/column is dropped.
PoolResult maxpool2d(const Tensor& t);
Tensor maxpool2d_backward(const PoolResult& pool, const std::vector<std::size_t>& input_shape,
                          const Tensor& grad_output);

// y = W x + b with x [N], W [M, N], b [M].
Tensor fully_connected(const Tensor& x, const Tensor& w, const Tensor& b);

struct DenseGrads {
  Tensor x;
  Tensor w;
  Tensor b;
};
DenseGrads fully_connected_backward(const Tensor& x, const Tensor& w, const Tensor& grad_output);

// Max-subtracted exponential normalization.
Tensor softmax(const Tensor& logits);

inline constexpr double kProbabilityFloor = 1e-12;

// -log(probs[target]) with probabilities clamped to kProbabilityFloor.
double cross_entropy(const Tensor& probs, std::size_t target);
double cross_entropy(const Tensor& probs, const Tensor& one_hot);

// Raw kernels over contiguous buffers. The model's forward/backward passes
// call these directly against preallocated workspaces.
namespace kernels {

int conv_out_extent(int extent, Padding padding);

// Layout shared by the convolution kernels. The input is copied into a
// zero-bordered source buffer of width ws; the 3x3 tap (ky, kx) then reads the
// contiguous block src[ky * ws + kx + n], n < oh * ws, so each tap is one
// matrix product. Columns ow..ws-1 of that extended output are discarded.
struct ConvGeometry {
  int h = 0, w = 0, c = 0, f = 0;  // input extent, input channels, filters
  int pad = 0;
  int oh = 0, ow = 0;  // output extent
  int ws = 0;          // source row width
  std::size_t src_pixels() const;  // including two pixels of slack
  std::size_t ext_pixels() const { return static_cast<std::size_t>(oh) * static_cast<std::size_t>(ws); }
};
ConvGeometry conv_geometry(int h, int w, int c, int f, Padding padding);

// src[src_pixels * C] = zero-bordered copy of input[H, W, C].
void conv_pad(const float* input, const ConvGeometry& g, float* src);
// out[OH, OW, F] = correlation of src with kernels[F, 3, 3, C] plus bias.
// ext is scratch of ext_pixels * F floats.
void conv_forward(const float* src, const ConvGeometry& g, const float* kernels, const float* bias, float* ext,
                  float* out);
// dkernels and dbias are overwritten. When dinput is non-null it receives the
// input gradient [H, W, C] (overwritten); dsrc is then scratch of
// src_pixels * C floats. ext is scratch of ext_pixels * F floats.
void conv_backward(const float* src, const ConvGeometry& g, const float* kernels, const float* dout, float* ext,
                   float* dkernels, float* dbias, float* dsrc, float* dinput);

void relu_inplace(float* v, std::size_t n);
// g[i] = 0 where out[i] <= 0.
void relu_mask(const float* out, float* g, std::size_t n);

void maxpool_forward(const float* input, int h, int w, int c, float* out, std::uint32_t* argmax);
// dinput must be zeroed by the caller; entries routed through argmax are added.
void maxpool_backward_add(const float* dout, const std::uint32_t* argmax, std::size_t n_out, float* dinput);

void dense_forward(const float* x, int n, const float* w, const float* b, int m, float* y);
// dw[M, N] = dy x^T, db = dy, dx = W^T dy when dx is non-null. Outputs are overwritten.
void dense_backward(const float* x, int n, const float* w, int m, const float* dy, float* dw, float* db, float* dx);

void softmax(const float* logits, int d, float* probs);

}  // namespace kernels

}  // namespace drcnet::nn
