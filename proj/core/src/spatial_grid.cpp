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

#include "drcnet/spatial_grid.hpp"

#include <algorithm>

namespace drcnet {

SpatialGrid::SpatialGrid(Coord extent_x, Coord extent_y, Coord cell_size)
    : cell_(std::max<Coord>(1, cell_size)),
      nx_(static_cast<long>(std::max<Coord>(1, (extent_x + cell_ - 1) / cell_ + 1))),
      ny_(static_cast<long>(std::max<Coord>(1, (extent_y + cell_ - 1) / cell_ + 1))),
      cells_(static_cast<std::size_t>(nx_ * ny_)) {}

SpatialGrid::CellRange SpatialGrid::cells_for(const Rect& r, Coord margin) const {
  auto clamp_x = [&](Coord v) { return std::clamp<long>(static_cast<long>(v / cell_), 0, nx_ - 1); };
  auto clamp_y = [&](Coord v) { return std::clamp<long>(static_cast<long>(v / cell_), 0, ny_ - 1); };
  return {clamp_x(std::max<Coord>(0, r.x0 - margin)), clamp_y(std::max<Coord>(0, r.y0 - margin)),
          clamp_x(r.x1 + margin), clamp_y(r.y1 + margin)};
}

void SpatialGrid::insert(std::uint32_t id, const Rect& r) {
  const auto c = cells_for(r, 0);
  for (long cy = c.cy0; cy <= c.cy1; ++cy)
    for (long cx = c.cx0; cx <= c.cx1; ++cx) cells_[static_cast<std::size_t>(cy * nx_ + cx)].push_back(id);
}

void SpatialGrid::erase(std::uint32_t id, const Rect& r) {
  const auto c = cells_for(r, 0);
  for (long cy = c.cy0; cy <= c.cy1; ++cy) {
    for (long cx = c.cx0; cx <= c.cx1; ++cx) {
      auto& cell = cells_[static_cast<std::size_t>(cy * nx_ + cx)];
      cell.erase(std::remove(cell.begin(), cell.end(), id), cell.end());
    }
  }
}

std::vector<std::uint32_t> SpatialGrid::query(const Rect& r, Coord margin) const {
  std::vector<std::uint32_t> out;
  const auto c = cells_for(r, margin);
  for (long cy = c.cy0; cy <= c.cy1; ++cy) {
    for (long cx = c.cx0; cx <= c.cx1; ++cx) {
      const auto& cell = cells_[static_cast<std::size_t>(cy * nx_ + cx)];
      out.insert(out.end(), cell.begin(), cell.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace drcnet
