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

#include "drcnet/labels.hpp"

#include <string>

#include "drcnet/errors.hpp"

namespace drcnet {
namespace {

constexpr std::array<ClipLabel, 2> kOneRuleClasses = {ClipLabel::kNdrc, ClipLabel::kDrc1};
constexpr std::array<ClipLabel, 8> kThreeRuleClasses = {
    ClipLabel::kNdrc,  ClipLabel::kDrc1,  ClipLabel::kDrc2,  ClipLabel::kDrc3,
    ClipLabel::kDrc12, ClipLabel::kDrc13, ClipLabel::kDrc23, ClipLabel::kDrc123,
};

}  // namespace

std::string_view label_name(ClipLabel label) {
  switch (label) {
    case ClipLabel::kNdrc:
      return "NDRC";
    case ClipLabel::kDrc1:
      return "DRC1";
    case ClipLabel::kDrc2:
      return "DRC2";
    case ClipLabel::kDrc12:
      return "DRC12";
    case ClipLabel::kDrc3:
      return "DRC3";
    case ClipLabel::kDrc13:
      return "DRC13";
    case ClipLabel::kDrc23:
      return "DRC23";
    case ClipLabel::kDrc123:
      return "DRC123";
  }
  return "?";
}

ClipLabel parse_label(std::string_view name) {
  for (ClipLabel l : kThreeRuleClasses)
    if (label_name(l) == name) return l;
  throw UnknownLabel("'" + std::string(name) + "'");
}

std::size_t class_count(LabelSpace space) { return class_labels(space).size(); }

std::span<const ClipLabel> class_labels(LabelSpace space) {
  if (space == LabelSpace::kOneRule) return kOneRuleClasses;
  return kThreeRuleClasses;
}

std::size_t class_index(LabelSpace space, ClipLabel label) {
  const auto labels = class_labels(space);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return i;
  throw UnknownLabel(std::string(label_name(label)) + " is not in the " +
                     (space == LabelSpace::kOneRule ? "1-rule" : "3-rule") + " label space");
}

ClipLabel label_for_mask(LabelSpace space, unsigned mask) {
  if (space == LabelSpace::kOneRule) mask &= rule_bit(Rule::kWidth);
  return static_cast<ClipLabel>(mask & 7u);
}

LabelSpace label_space_for_classes(std::size_t d) {
  if (d == 2) return LabelSpace::kOneRule;
  if (d == 8) return LabelSpace::kThreeRule;
  throw LabelSpaceMismatch("no label space has " + std::to_string(d) + " classes");
}

}  // namespace drcnet
