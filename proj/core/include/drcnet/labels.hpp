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

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "drcnet/geometry.hpp"

namespace drcnet {

// Clip class. The enumerator value is the bitmask of rules present
// (rule_bit), so DRC12 == M1.1 | M1.6.
enum class ClipLabel : std::uint8_t {
  kNdrc = 0,
  kDrc1 = 1,
  kDrc2 = 2,
  kDrc12 = 3,
  kDrc3 = 4,
  kDrc13 = 5,
  kDrc23 = 6,
  kDrc123 = 7,
};

std::string_view label_name(ClipLabel label);  // "NDRC", "DRC1", ..., "DRC123"
ClipLabel parse_label(std::string_view name);    // throws UnknownLabel
inline unsigned label_mask(ClipLabel label) { return static_cast<unsigned>(label); }

// Which rules a classifier distinguishes. The one-rule space only sees M1.1;
// the three-rule space is every subset of {M1.1, M1.6, M1.7}. Class index 0 is
// always NDRC.
enum class LabelSpace : std::uint8_t { kOneRule = 1, kThreeRule = 3 };

std::size_t class_count(LabelSpace space);                 // d = 2 or 8
std::span<const ClipLabel> class_labels(LabelSpace space);  // index -> label
std::size_t class_index(LabelSpace space, ClipLabel label);  // throws UnknownLabel
// Canonical label for a rule bitmask, dropping rules the space ignores.
ClipLabel label_for_mask(LabelSpace space, unsigned mask);
LabelSpace label_space_for_classes(std::size_t d);  // throws LabelSpaceMismatch

}  // namespace drcnet
