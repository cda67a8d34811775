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

#include "drcnet/image.hpp"

#include <bit>
#include <fstream>
#include <string>

#include "drcnet/errors.hpp"

namespace drcnet {

BitImage::BitImage(int width, int height)
    : width_(width),
      height_(height),
      words_((static_cast<std::size_t>(width) * static_cast<std::size_t>(height) + 63) / 64, 0) {}

void BitImage::fill_row(int row, int c0, int c1) {
  for (int c = c0; c < c1; ++c) set(c, row);
}

std::size_t BitImage::popcount() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

void BitImage::to_floats(float* out) const {
  const std::size_t n = static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  for (std::size_t i = 0; i < n; ++i) out[i] = ((words_[i >> 6] >> (i & 63)) & 1u) ? 1.0f : 0.0f;
}

void write_gray_pgm(const std::filesystem::path& path, int width, int height,
                    const std::vector<std::uint8_t>& pixels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write image " + path.string());
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw DataError("short write to " + path.string());
}

void write_pgm(const std::filesystem::path& path, const BitImage& image) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(image.width()) * static_cast<std::size_t>(image.height()));
  std::size_t i = 0;
  for (int r = 0; r < image.height(); ++r)
    for (int c = 0; c < image.width(); ++c) px[i++] = image.get(c, r) ? 255 : 0;
  write_gray_pgm(path, image.width(), image.height(), px);
}

BitImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open image " + path.string());
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (!in || magic != "P5" || w <= 0 || h <= 0 || maxval != 255)
    throw DataError("unsupported graymap header in " + path.string());
  in.get();  // single whitespace after maxval
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  in.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (in.gcount() != static_cast<std::streamsize>(px.size())) throw DataError("truncated image " + path.string());
  BitImage img(w, h);
  std::size_t i = 0;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (px[i++] != 0) img.set(c, r);
  return img;
}

}  // namespace drcnet
