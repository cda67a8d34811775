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

#include "drcnet/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

#include "drcnet/errors.hpp"

namespace drcnet {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts)
    for (std::uint64_t c : row) t += c;
  return t;
}

std::uint64_t ConfusionMatrix::row_total(std::size_t truth) const {
  std::uint64_t t = 0;
  for (std::uint64_t c : counts.at(truth)) t += c;
  return t;
}

std::uint64_t ConfusionMatrix::col_total(std::size_t pred) const {
  std::uint64_t t = 0;
  for (const auto& row : counts) t += row.at(pred);
  return t;
}

bool ConfusionMatrix::diagonal_dominant() const {
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j)
      if (j != i && counts[i][j] >= counts[i][i]) return false;
  return true;
}

ConfusionMatrix confusion(std::span<const ClipLabel> pred, std::span<const ClipLabel> truth,
                          std::span<const ClipLabel> classes) {
  if (pred.size() != truth.size())
    throw LengthMismatch(std::to_string(pred.size()) + " predictions for " + std::to_string(truth.size()) + " labels");
  auto index_of = [&](ClipLabel l) {
    const auto it = std::find(classes.begin(), classes.end(), l);
    if (it == classes.end()) throw UnknownLabel("label " + std::string(label_name(l)) + " is not in the class list");
    return static_cast<std::size_t>(it - classes.begin());
  };
  ConfusionMatrix cm;
  cm.classes.assign(classes.begin(), classes.end());
  cm.counts.assign(classes.size(), std::vector<std::uint64_t>(classes.size(), 0));
  for (std::size_t k = 0; k < pred.size(); ++k) ++cm.counts[index_of(truth[k])][index_of(pred[k])];
  return cm;
}

BinaryCounts binary_collapse(const ConfusionMatrix& cm) {
  const auto it = std::find(cm.classes.begin(), cm.classes.end(), ClipLabel::kNdrc);
  if (it == cm.classes.end()) throw MissingCleanClass("confusion matrix has no NDRC class");
  const auto clean = static_cast<std::size_t>(it - cm.classes.begin());
  BinaryCounts b;
  for (std::size_t i = 0; i < cm.size(); ++i)
    for (std::size_t j = 0; j < cm.size(); ++j) {
      const std::uint64_t c = cm.counts[i][j];
      if (i == clean)
        (j == clean ? b.tn : b.fp) += c;
      else
        (j == clean ? b.fn : b.tp) += c;
    }
  return b;
}

namespace {
Metric ratio(std::uint64_t num, std::uint64_t other) {
  const std::uint64_t den = num + other;
  if (den == 0) return {0.0, false};
  return {static_cast<double>(num) / static_cast<double>(den), true};
}
}  // namespace

Metric recall(std::uint64_t tp, std::uint64_t fn) { return ratio(tp, fn); }
Metric precision(std::uint64_t tp, std::uint64_t fp) { return ratio(tp, fp); }
Metric fnr(std::uint64_t fn, std::uint64_t tp) { return ratio(fn, tp); }
Metric fpr(std::uint64_t fp, std::uint64_t tn) { return ratio(fp, tn); }

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm) {
  std::vector<ClassMetrics> out;
  for (std::size_t i = 0; i < cm.size(); ++i) {
    const std::uint64_t tp = cm.counts[i][i];
    const std::uint64_t row = cm.row_total(i);
    const std::uint64_t col = cm.col_total(i);
    out.push_back({cm.classes[i], row, recall(tp, row - tp), precision(tp, col - tp)});
  }
  return out;
}

EvalReport make_eval_report(const ConfusionMatrix& cm, std::string split,
                            std::vector<std::pair<std::string, std::string>> config) {
  EvalReport r;
  r.split = std::move(split);
  r.matrix = cm;
  r.binary = binary_collapse(cm);
  r.recall = recall(r.binary.tp, r.binary.fn);
  r.precision = precision(r.binary.tp, r.binary.fp);
  r.fnr = fnr(r.binary.fn, r.binary.tp);
  r.fpr = fpr(r.binary.fp, r.binary.tn);
  std::uint64_t diag = 0;
  for (std::size_t i = 0; i < cm.size(); ++i) diag += cm.counts[i][i];
  r.accuracy = cm.total() > 0 ? static_cast<double>(diag) / static_cast<double>(cm.total()) : 0.0;
  r.per_class = per_class_metrics(cm);
  r.config = std::move(config);
  return r;
}

namespace {
std::string show(const Metric& m) {
  if (!m.defined) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", m.value);
  return buf;
}
}  // namespace

void write_eval_text(std::ostream& out, const EvalReport& r) {
  for (const auto& [k, v] : r.config) out << "# " << k << '=' << v << '\n';
  out << "split " << r.split << ", " << r.matrix.total() << " samples\n\n";
  out << "confusion matrix (rows: truth, columns: prediction)\n";
  std::size_t width = 6;
  for (std::size_t i = 0; i < r.matrix.size(); ++i) {
    width = std::max(width, label_name(r.matrix.classes[i]).size() + 1);
    for (std::size_t j = 0; j < r.matrix.size(); ++j) width = std::max(width, std::to_string(r.matrix.counts[i][j]).size() + 1);
  }
  auto cell = [&](const std::string& s) { out << std::string(width - std::min(width, s.size()), ' ') << s; };
  cell("");
  for (ClipLabel c : r.matrix.classes) cell(std::string(label_name(c)));
  out << '\n';
  for (std::size_t i = 0; i < r.matrix.size(); ++i) {
    cell(std::string(label_name(r.matrix.classes[i])));
    for (std::size_t j = 0; j < r.matrix.size(); ++j) cell(std::to_string(r.matrix.counts[i][j]));
    out << '\n';
  }
  out << "\nviolation present: TP " << r.binary.tp << "  FN " << r.binary.fn << "  TN " << r.binary.tn << "  FP "
      << r.binary.fp << '\n';
  out << "recall    " << show(r.recall) << '\n';
  out << "precision " << show(r.precision) << '\n';
  out << "fnr       " << show(r.fnr) << '\n';
  out << "fpr       " << show(r.fpr) << '\n';
  out << "accuracy  " << show({r.accuracy, r.matrix.total() > 0}) << '\n';
  out << "\nper class (one vs rest)\n";
  for (const ClassMetrics& c : r.per_class)
    out << "  " << label_name(c.label) << "  support " << c.support << "  recall " << show(c.recall) << "  precision "
        << show(c.precision) << '\n';
}

std::string eval_json(const EvalReport& r) {
  using json = nlohmann::ordered_json;
  auto metric = [](const Metric& m) { return json{{"value", m.value}, {"defined", m.defined}}; };
  json j;
  json cfg = json::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  j["config"] = cfg;
  j["split"] = r.split;
  j["samples"] = r.matrix.total();
  json classes = json::array();
  for (ClipLabel c : r.matrix.classes) classes.push_back(std::string(label_name(c)));
  j["classes"] = classes;
  j["confusion"] = r.matrix.counts;
  j["binary"] = {{"tp", r.binary.tp}, {"fn", r.binary.fn}, {"tn", r.binary.tn}, {"fp", r.binary.fp}};
  j["recall"] = metric(r.recall);
  j["precision"] = metric(r.precision);
  j["fnr"] = metric(r.fnr);
  j["fpr"] = metric(r.fpr);
  j["accuracy"] = r.accuracy;
  json pc = json::array();
  for (const ClassMetrics& c : r.per_class)
    pc.push_back({{"class", std::string(label_name(c.label))},
                  {"support", c.support},
                  {"recall", metric(c.recall)},
                  {"precision", metric(c.precision)}});
  j["per_class"] = pc;
  return j.dump(2) + "\n";
}

}  // namespace drcnet
