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

#include "drcnet/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include <Eigen/Core>

#include "drcnet/errors.hpp"

namespace drcnet::nn {
namespace {

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;
using MapVec = Eigen::Map<Eigen::VectorXf>;
using ConstMapVec = Eigen::Map<const Eigen::VectorXf>;

void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeMismatch(what);
}

int as_int(std::size_t v) { return static_cast<int>(v); }

}  // namespace

namespace kernels {

int conv_out_extent(int extent, Padding padding) { return padding == Padding::kSame ? extent : extent - 2; }

std::size_t ConvGeometry::src_pixels() const {
  return static_cast<std::size_t>(oh + 2) * static_cast<std::size_t>(ws) + 2;
}

ConvGeometry conv_geometry(int h, int w, int c, int f, Padding padding) {
  ConvGeometry g;
  g.h = h;
  g.w = w;
  g.c = c;
  g.f = f;
  g.pad = padding == Padding::kSame ? 1 : 0;
  g.oh = conv_out_extent(h, padding);
  g.ow = conv_out_extent(w, padding);
  g.ws = w + 2 * g.pad;
  return g;
}

void conv_pad(const float* input, const ConvGeometry& g, float* src) {
  const auto c = static_cast<std::size_t>(g.c);
  std::fill(src, src + g.src_pixels() * c, 0.0f);
  for (int y = 0; y < g.h; ++y)
    std::copy(input + static_cast<std::size_t>(y) * static_cast<std::size_t>(g.w) * c,
              input + static_cast<std::size_t>(y + 1) * static_cast<std::size_t>(g.w) * c,
              src + (static_cast<std::size_t>(y + g.pad) * static_cast<std::size_t>(g.ws) + static_cast<std::size_t>(g.pad)) * c);
}

namespace {

std::size_t tap_offset(const ConvGeometry& g, int t) {
  return static_cast<std::size_t>((t / 3) * g.ws + t % 3);
}

// Single input channel: each output pixel is 9 scalar-times-vector updates
// over the filters, which beats a rank-1 matrix product. Clip rasters are
// mostly zero, so zero taps are skipped. FF > 0 fixes the filter count at
// compile time.
template <int FF>
void conv_forward_c1(const float* src, const ConvGeometry& g, const float* kernels, const float* bias, float* out) {
  const std::size_t f = FF > 0 ? static_cast<std::size_t>(FF) : static_cast<std::size_t>(g.f);
  std::vector<float> kt(9 * f);  // [tap][filter]
  for (std::size_t o = 0; o < f; ++o)
    for (std::size_t t = 0; t < 9; ++t) kt[t * f + o] = kernels[o * 9 + t];
  std::size_t off[9];
  for (int t = 0; t < 9; ++t) off[t] = tap_offset(g, t);
  for (int y = 0; y < g.oh; ++y) {
    for (int x = 0; x < g.ow; ++x) {
      const float* s = src + static_cast<std::size_t>(y) * static_cast<std::size_t>(g.ws) + static_cast<std::size_t>(x);
      float* __restrict o =
          out + (static_cast<std::size_t>(y) * static_cast<std::size_t>(g.ow) + static_cast<std::size_t>(x)) * f;
      for (std::size_t k = 0; k < f; ++k) o[k] = bias[k];
      for (std::size_t t = 0; t < 9; ++t) {
        const float v = s[off[t]];
        if (v == 0.0f) continue;
        const float* kr = kt.data() + t * f;
        for (std::size_t k = 0; k < f; ++k) o[k] += v * kr[k];
      }
    }
  }
}

template <int FF>
void conv_backward_c1(const float* src, const ConvGeometry& g, const float* kernels, const float* dout,
                      float* dkernels, float* dbias, float* dsrc) {
  const std::size_t f = FF > 0 ? static_cast<std::size_t>(FF) : static_cast<std::size_t>(g.f);
  std::vector<float> acc_buf(9 * f, 0.0f), bacc_buf(f, 0.0f);
  float* __restrict acc = acc_buf.data();
  float* __restrict bacc = bacc_buf.data();
  std::size_t off[9];
  for (int t = 0; t < 9; ++t) off[t] = tap_offset(g, t);
  for (int y = 0; y < g.oh; ++y) {
    for (int x = 0; x < g.ow; ++x) {
      const std::size_t n = static_cast<std::size_t>(y) * static_cast<std::size_t>(g.ws) + static_cast<std::size_t>(x);
      const float* d = dout + (static_cast<std::size_t>(y) * static_cast<std::size_t>(g.ow) + static_cast<std::size_t>(x)) * f;
      for (std::size_t k = 0; k < f; ++k) bacc[k] += d[k];
      for (std::size_t t = 0; t < 9; ++t) {
        const float v = src[n + off[t]];
        if (v == 0.0f) continue;
        float* a = acc + t * f;
        for (std::size_t k = 0; k < f; ++k) a[k] += v * d[k];
      }
      if (dsrc != nullptr)
        for (std::size_t t = 0; t < 9; ++t) {
          float s = 0.0f;
          for (std::size_t k = 0; k < f; ++k) s += d[k] * kernels[k * 9 + t];
          dsrc[n + off[t]] += s;
        }
    }
  }
  for (std::size_t k = 0; k < f; ++k) {
    dbias[k] = bacc[k];
    for (std::size_t t = 0; t < 9; ++t) dkernels[k * 9 + t] = acc[t * f + k];
  }
}

}  // namespace

void conv_forward(const float* src, const ConvGeometry& g, const float* kernels, const float* bias, float* ext,
                  float* out) {
  if (g.c == 1) {
    if (g.f == 16)
      conv_forward_c1<16>(src, g, kernels, bias, out);
    else if (g.f == 32)
      conv_forward_c1<32>(src, g, kernels, bias, out);
    else
      conv_forward_c1<0>(src, g, kernels, bias, out);
    return;
  }
  const auto n = static_cast<Eigen::Index>(g.ext_pixels());
  const Eigen::Index c = g.c, f = g.f;
  ConstMapMat kern(kernels, f, 9 * c);
  MapMat e(ext, n, f);
  for (int t = 0; t < 9; ++t) {
    ConstMapMat block(src + tap_offset(g, t) * static_cast<std::size_t>(c), n, c);
    if (t == 0)
      e.noalias() = block * kern.middleCols(0, c).transpose();
    else
      e.noalias() += block * kern.middleCols(t * c, c).transpose();
  }
  const auto fz = static_cast<std::size_t>(f);
  for (int y = 0; y < g.oh; ++y)
    for (int x = 0; x < g.ow; ++x) {
      const float* s = ext + (static_cast<std::size_t>(y) * static_cast<std::size_t>(g.ws) + static_cast<std::size_t>(x)) * fz;
      float* o = out + (static_cast<std::size_t>(y) * static_cast<std::size_t>(g.ow) + static_cast<std::size_t>(x)) * fz;
      for (std::size_t k = 0; k < fz; ++k) o[k] = s[k] + bias[k];
    }
}

void conv_backward(const float* src, const ConvGeometry& g, const float* kernels, const float* dout, float* ext,
                   float* dkernels, float* dbias, float* dsrc, float* dinput) {
  const auto c = static_cast<std::size_t>(g.c);
  if (dinput != nullptr) std::fill(dsrc, dsrc + g.src_pixels() * c, 0.0f);
  if (g.c == 1) {
    float* ds = dinput != nullptr ? dsrc : nullptr;
    if (g.f == 16)
      conv_backward_c1<16>(src, g, kernels, dout, dkernels, dbias, ds);
    else if (g.f == 32)
      conv_backward_c1<32>(src, g, kernels, dout, dkernels, dbias, ds);
    else
      conv_backward_c1<0>(src, g, kernels, dout, dkernels, dbias, ds);
  } else {
    const auto fz = static_cast<std::size_t>(g.f);
    // Extended gradient: zero in the discarded columns.
    std::fill(ext, ext + g.ext_pixels() * fz, 0.0f);
    std::fill(dbias, dbias + fz, 0.0f);
    for (int y = 0; y < g.oh; ++y)
      for (int x = 0; x < g.ow; ++x) {
        const float* d = dout + (static_cast<std::size_t>(y) * static_cast<std::size_t>(g.ow) + static_cast<std::size_t>(x)) * fz;
        float* e = ext + (static_cast<std::size_t>(y) * static_cast<std::size_t>(g.ws) + static_cast<std::size_t>(x)) * fz;
        for (std::size_t k = 0; k < fz; ++k) {
          e[k] = d[k];
          dbias[k] += d[k];
        }
      }
    const auto n = static_cast<Eigen::Index>(g.ext_pixels());
    const Eigen::Index ci = g.c, f = g.f;
    ConstMapMat e(ext, n, f);
    ConstMapMat kern(kernels, f, 9 * ci);
    MapMat dk(dkernels, f, 9 * ci);
    for (int t = 0; t < 9; ++t) {
      const std::size_t off = tap_offset(g, t) * c;
      dk.middleCols(t * ci, ci).noalias() = e.transpose() * ConstMapMat(src + off, n, ci);
      if (dinput != nullptr) MapMat(dsrc + off, n, ci).noalias() += e * kern.middleCols(t * ci, ci);
    }
  }
  if (dinput != nullptr)
    for (int y = 0; y < g.h; ++y)
      std::copy(dsrc + (static_cast<std::size_t>(y + g.pad) * static_cast<std::size_t>(g.ws) + static_cast<std::size_t>(g.pad)) * c,
                dsrc + (static_cast<std::size_t>(y + g.pad) * static_cast<std::size_t>(g.ws) + static_cast<std::size_t>(g.pad + g.w)) * c,
                dinput + static_cast<std::size_t>(y) * static_cast<std::size_t>(g.w) * c);
}

void relu_inplace(float* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) v[i] = v[i] > 0.0f ? v[i] : 0.0f;
}

void relu_mask(const float* out, float* g, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!(out[i] > 0.0f)) g[i] = 0.0f;
}

void maxpool_forward(const float* input, int h, int w, int c, float* out, std::uint32_t* argmax) {
  const int oh = h / 2, ow = w / 2;
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      const std::size_t o = static_cast<std::size_t>(y * ow + x) * static_cast<std::size_t>(c);
      const std::size_t i00 = static_cast<std::size_t>((2 * y) * w + 2 * x) * static_cast<std::size_t>(c);
      const std::size_t i01 = i00 + static_cast<std::size_t>(c);
      const std::size_t i10 = i00 + static_cast<std::size_t>(w) * static_cast<std::size_t>(c);
      const std::size_t i11 = i10 + static_cast<std::size_t>(c);
      for (int ch = 0; ch < c; ++ch) {
        // First maximum in scan order wins ties.
        std::size_t best = i00 + static_cast<std::size_t>(ch);
        for (std::size_t cand : {i01, i10, i11})
          if (input[cand + static_cast<std::size_t>(ch)] > input[best]) best = cand + static_cast<std::size_t>(ch);
        out[o + static_cast<std::size_t>(ch)] = input[best];
        argmax[o + static_cast<std::size_t>(ch)] = static_cast<std::uint32_t>(best);
      }
    }
  }
}

void maxpool_backward_add(const float* dout, const std::uint32_t* argmax, std::size_t n_out, float* dinput) {
  for (std::size_t i = 0; i < n_out; ++i) dinput[argmax[i]] += dout[i];
}

void dense_forward(const float* x, int n, const float* w, const float* b, int m, float* y) {
  MapVec(y, m).noalias() = ConstMapMat(w, m, n) * ConstMapVec(x, n) + ConstMapVec(b, m);
}

void dense_backward(const float* x, int n, const float* w, int m, const float* dy, float* dw, float* db, float* dx) {
  ConstMapVec g(dy, m);
  MapMat(dw, m, n).noalias() = g * ConstMapVec(x, n).transpose();
  MapVec(db, m) = g;
  if (dx != nullptr) MapVec(dx, n).noalias() = ConstMapMat(w, m, n).transpose() * g;
}

void softmax(const float* logits, int d, float* probs) {
  const float mx = *std::max_element(logits, logits + d);
  double sum = 0.0;
  for (int i = 0; i < d; ++i) {
    const double e = std::exp(static_cast<double>(logits[i]) - static_cast<double>(mx));
    probs[i] = static_cast<float>(e);
    sum += e;
  }
  for (int i = 0; i < d; ++i) probs[i] = static_cast<float>(static_cast<double>(probs[i]) / sum);
}

}  // namespace kernels

namespace {

void check_conv_shapes(const Tensor& input, const Tensor& kernels, Padding padding) {
  require(input.rank() == 3, "conv input must be [H, W, C]");
  require(kernels.rank() == 4 && kernels.dim(1) == 3 && kernels.dim(2) == 3, "conv kernels must be [F, 3, 3, Cin]");
  require(kernels.dim(3) == input.dim(2), "conv kernel channels (" + std::to_string(kernels.dim(3)) +
                                              ") do not match input channels (" + std::to_string(input.dim(2)) + ")");
  if (padding == Padding::kValid) require(input.dim(0) >= 3 && input.dim(1) >= 3, "valid conv needs H, W >= 3");
}

}  // namespace

Tensor conv2d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias, Padding padding) {
  check_conv_shapes(input, kernels, padding);
  require(bias.rank() == 1 && bias.dim(0) == kernels.dim(0), "conv bias must be [F]");
  const auto g = kernels::conv_geometry(as_int(input.dim(0)), as_int(input.dim(1)), as_int(input.dim(2)),
                                        as_int(kernels.dim(0)), padding);
  std::vector<float> src(g.src_pixels() * static_cast<std::size_t>(g.c));
  std::vector<float> ext(g.ext_pixels() * static_cast<std::size_t>(g.f));
  kernels::conv_pad(input.data(), g, src.data());
  Tensor out({static_cast<std::size_t>(g.oh), static_cast<std::size_t>(g.ow), static_cast<std::size_t>(g.f)});
  kernels::conv_forward(src.data(), g, kernels.data(), bias.data(), ext.data(), out.data());
  return out;
}

Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& kernels, const Tensor& grad_output, Padding padding,
                            bool want_input_grad) {
  check_conv_shapes(input, kernels, padding);
  const auto g = kernels::conv_geometry(as_int(input.dim(0)), as_int(input.dim(1)), as_int(input.dim(2)),
                                        as_int(kernels.dim(0)), padding);
  require(grad_output.rank() == 3 && as_int(grad_output.dim(0)) == g.oh && as_int(grad_output.dim(1)) == g.ow &&
              as_int(grad_output.dim(2)) == g.f,
          "conv output gradient has the wrong shape");
  std::vector<float> src(g.src_pixels() * static_cast<std::size_t>(g.c));
  std::vector<float> ext(g.ext_pixels() * static_cast<std::size_t>(g.f));
  std::vector<float> dsrc(want_input_grad ? src.size() : 0);
  kernels::conv_pad(input.data(), g, src.data());
  Conv2dGrads out;
  out.kernels = Tensor(kernels.shape());
  out.bias = Tensor({static_cast<std::size_t>(g.f)});
  if (want_input_grad) out.input = Tensor(input.shape());
  kernels::conv_backward(src.data(), g, kernels.data(), grad_output.data(), ext.data(), out.kernels.data(),
                         out.bias.data(), want_input_grad ? dsrc.data() : nullptr,
                         want_input_grad ? out.input.data() : nullptr);
  return out;
}

Tensor relu(const Tensor& t) {
  Tensor out = t;
  kernels::relu_inplace(out.data(), out.size());
  return out;
}

Tensor relu_backward(const Tensor& output, const Tensor& grad_output) {
  require(output.shape() == grad_output.shape(), "relu gradient shape mismatch");
  Tensor g = grad_output;
  kernels::relu_mask(output.data(), g.data(), g.size());
  return g;
}

PoolResult maxpool2d(const Tensor& t) {
  require(t.rank() == 3, "pool input must be [H, W, C]");
  require(t.dim(0) >= 2 && t.dim(1) >= 2, "pool input must be at least 2x2");
  PoolResult r;
  r.output = Tensor({t.dim(0) / 2, t.dim(1) / 2, t.dim(2)});
  r.argmax.resize(r.output.size());
  kernels::maxpool_forward(t.data(), as_int(t.dim(0)), as_int(t.dim(1)), as_int(t.dim(2)), r.output.data(),
                           r.argmax.data());
  return r;
}

Tensor maxpool2d_backward(const PoolResult& pool, const std::vector<std::size_t>& input_shape,
                          const Tensor& grad_output) {
  require(grad_output.shape() == pool.output.shape(), "pool gradient shape mismatch");
  Tensor g(input_shape);
  kernels::maxpool_backward_add(grad_output.data(), pool.argmax.data(), pool.argmax.size(), g.data());
  return g;
}

Tensor fully_connected(const Tensor& x, const Tensor& w, const Tensor& b) {
  require(w.rank() == 2, "dense weights must be [M, N]");
  require(x.size() == w.dim(1), "dense input length does not match weights");
  require(b.rank() == 1 && b.dim(0) == w.dim(0), "dense bias must be [M]");
  Tensor y({w.dim(0)});
  kernels::dense_forward(x.data(), as_int(w.dim(1)), w.data(), b.data(), as_int(w.dim(0)), y.data());
  return y;
}

DenseGrads fully_connected_backward(const Tensor& x, const Tensor& w, const Tensor& grad_output) {
  require(w.rank() == 2 && x.size() == w.dim(1) && grad_output.size() == w.dim(0), "dense gradient shape mismatch");
  DenseGrads g{Tensor({x.size()}), Tensor(w.shape()), Tensor({w.dim(0)})};
  kernels::dense_backward(x.data(), as_int(w.dim(1)), w.data(), as_int(w.dim(0)), grad_output.data(), g.w.data(),
                          g.b.data(), g.x.data());
  return g;
}

Tensor softmax(const Tensor& logits) {
  require(logits.rank() == 1, "softmax takes a vector");
  Tensor p(logits.shape());
  kernels::softmax(logits.data(), as_int(logits.size()), p.data());
  return p;
}

double cross_entropy(const Tensor& probs, std::size_t target) {
  require(target < probs.size(), "target class out of range");
  return -std::log(std::max(static_cast<double>(probs[target]), kProbabilityFloor));
}

double cross_entropy(const Tensor& probs, const Tensor& one_hot) {
  require(probs.shape() == one_hot.shape(), "target shape mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i)
    if (one_hot[i] != 0.0f)
      loss -= static_cast<double>(one_hot[i]) * std::log(std::max(static_cast<double>(probs[i]), kProbabilityFloor));
  return loss;
}

}  // namespace drcnet::nn
