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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "drcnet/labels.hpp"

namespace drcnet {

// counts[i][j] = samples of true class i predicted as class j.
struct ConfusionMatrix {
  std::vector<ClipLabel> classes;
  std::vector<std::vector<std::uint64_t>> counts;

  std::size_t size() const { return classes.size(); }
  std::uint64_t at(std::size_t truth, std::size_t pred) const { return counts[truth][pred]; }
  std::uint64_t total() const;
  std::uint64_t row_total(std::size_t truth) const;
  std::uint64_t col_total(std::size_t pred) const;
  // Every diagonal count exceeds every other count in its row.
  bool diagonal_dominant() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Throws LengthMismatch or UnknownLabel.
ConfusionMatrix confusion(std::span<const ClipLabel> pred, std::span<const ClipLabel> truth,
                          std::span<const ClipLabel> classes);

// Positive = any violating class.
struct BinaryCounts {
  std::uint64_t tp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t total() const { return tp + fn + tn + fp; }
  friend bool operator==(const BinaryCounts&, const BinaryCounts&) = default;
};
// Throws MissingCleanClass when NDRC is not among the classes.
BinaryCounts binary_collapse(const ConfusionMatrix& cm);

// A ratio whose denominator may be zero; then value is 0 and defined false.
struct Metric {
  double value = 0.0;
  bool defined = false;
};
Metric recall(std::uint64_t tp, std::uint64_t fn);     // TP / (TP + FN)
Metric precision(std::uint64_t tp, std::uint64_t fp);  // TP / (TP + FP)
Metric fnr(std::uint64_t fn, std::uint64_t tp);        // FN / (FN + TP)
Metric fpr(std::uint64_t fp, std::uint64_t tn);        // FP / (FP + TN)

struct ClassMetrics {
  ClipLabel label = ClipLabel::kNdrc;
  std::uint64_t support = 0;
  Metric recall;
  Metric precision;
};
// One-vs-rest recall and precision per class.
std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm);

struct EvalReport {
  std::string split;
  ConfusionMatrix matrix;
  BinaryCounts binary;
  Metric recall, precision, fnr, fpr;
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  std::vector<std::pair<std::string, std::string>> config;
};
EvalReport make_eval_report(const ConfusionMatrix& cm, std::string split = "test",
                            std::vector<std::pair<std::string, std::string>> config = {});

void write_eval_text(std::ostream& out, const EvalReport& report);
std::string eval_json(const EvalReport& report);  // pretty-printed, stable key order

}  // namespace drcnet
