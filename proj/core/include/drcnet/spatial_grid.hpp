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

#include "drcnet/geometry.hpp"

namespace drcnet {

// Uniform grid over [0, extent) used to find shapes near a query box. Each
// shape is registered in every cell its rectangle touches.
class SpatialGrid {
 public:
  SpatialGrid(Coord extent_x, Coord extent_y, Coord cell_size);

  void insert(std::uint32_t id, const Rect& r);
  void erase(std::uint32_t id, const Rect& r);

  // Ids of shapes registered in cells touched by `r` dilated by `margin`.
  // Each id appears once; order is ascending.
  std::vector<std::uint32_t> query(const Rect& r, Coord margin) const;

 private:
  struct CellRange {
    long cx0, cy0, cx1, cy1;
  };
  CellRange cells_for(const Rect& r, Coord margin) const;

  Coord cell_;
  long nx_;
  long ny_;
  std::vector<std::vector<std::uint32_t>> cells_;
};

}  // namespace drcnet
