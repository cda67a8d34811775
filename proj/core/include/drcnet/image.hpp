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
#include <filesystem>
#include <vector>

namespace drcnet {

// Binary occupancy raster at 1 px per nm. Pixel (col, row) covers the cell
// [origin_x + col, +1) x [origin_y + row, +1) of the source layout.
class BitImage {
 public:
  BitImage() = default;
  BitImage(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0; }

  bool get(int col, int row) const {
    const auto bit = static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
    return (words_[bit >> 6] >> (bit & 63)) & 1u;
  }
  void set(int col, int row, bool on = true) {
    const auto bit = static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
    if (on)
      words_[bit >> 6] |= std::uint64_t{1} << (bit & 63);
    else
      words_[bit >> 6] &= ~(std::uint64_t{1} << (bit & 63));
  }
  // Sets cols [c0, c1) on one row.
  void fill_row(int row, int c0, int c1);

  std::size_t popcount() const;

  // Row-major floats, 0.0 or 1.0.
  void to_floats(float* out) const;

  friend bool operator==(const BitImage&, const BitImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint64_t> words_;
};

// Binary graymap ("P5"), 8-bit, values {0, 255}, rows written in order.
void write_pgm(const std::filesystem::path& path, const BitImage& image);
BitImage read_pgm(const std::filesystem::path& path);  // nonzero -> 1; throws DataError

// 8-bit graymap of arbitrary byte pixels, row-major.
void write_gray_pgm(const std::filesystem::path& path, int width, int height,
                    const std::vector<std::uint8_t>& pixels);

}  // namespace drcnet
