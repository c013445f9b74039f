/*
 * Copyright 2026 The pcomp Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>

#include "pcomp/error.hpp"
#include "pcomp/eval.hpp"
#include "pcomp/stats.hpp"

namespace pcomp {

CompetenceClass video_vote(std::span<const CompetenceClass> window_preds,
                           std::span<const ClassProbs> window_probs) {
  if (window_preds.empty()) throw InputError("video_vote: no window predictions");
  if (!window_probs.empty() && window_probs.size() != window_preds.size()) {
    throw InputError("video_vote: probability count does not match predictions");
  }
  std::size_t high = 0;
  for (auto c : window_preds) high += c == CompetenceClass::kHigh ? 1 : 0;
  const std::size_t low = window_preds.size() - high;
  if (high != low) return high > low ? CompetenceClass::kHigh : CompetenceClass::kLow;
  if (!window_probs.empty()) {
    double p0 = 0.0, p1 = 0.0;
    for (const auto& p : window_probs) {
      p0 += p[0];
      p1 += p[1];
    }
    if (p1 > p0) return CompetenceClass::kHigh;
  }
  return CompetenceClass::kLow;
}

double video_median(std::span<const double> window_preds) {
  if (window_preds.empty()) throw InputError("video_median: no window predictions");
  return stats::median(window_preds);
}

ClassificationMetrics classification_metrics(std::span<const CompetenceClass> y_true,
                                             std::span<const CompetenceClass> y_pred) {
  if (y_true.size() != y_pred.size()) throw InputError("classification_metrics: length mismatch");
  if (y_true.empty()) throw InputError("classification_metrics: empty input");
  ClassificationMetrics m;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool t = y_true[i] == CompetenceClass::kHigh;
    const bool p = y_pred[i] == CompetenceClass::kHigh;
    if (t && p) ++m.tp;
    else if (!t && !p) ++m.tn;
    else if (p) ++m.fp;
    else ++m.fn;
  }
  m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(y_true.size());
  if (m.tp + m.fp > 0) m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  if (m.tp + m.fn > 0) m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  return m;
}

double mse(std::span<const double> y_true, std::span<const double> y_hat) {
  if (y_true.size() != y_hat.size()) throw InputError("mse: length mismatch");
  if (y_true.empty()) throw InputError("mse: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double d = y_true[i] - y_hat[i];
    s += d * d;
  }
  return s / static_cast<double>(y_true.size());
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("pearson_r: length mismatch");
  if (x.size() < 2) throw InputError("pearson_r: at least two values are required");
  const double mx = stats::mean(x), my = stats::mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DomainError("pearson_r: undefined for constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::string_view protocol_name(Protocol p) {
  return p == Protocol::kSameDataset ? "same-dataset" : "cross-dataset";
}

std::optional<MetricSummary> summarize(const ResultRow& row,
                                       std::optional<double> FoldMetrics::*metric) {
  std::vector<double> values;
  for (const auto& f : row.folds) {
    if (f.*metric) values.push_back(*(f.*metric));
  }
  if (values.empty()) return std::nullopt;
  MetricSummary s;
  s.n = values.size();
  s.mean = stats::mean(values);
  s.std = stats::population_std(values);
  return s;
}

const ResultRow* ResultTable::find(const CellKey& key) const {
  for (const auto& r : rows) {
    if (r.key == key) return &r;
  }
  return nullptr;
}

}  // namespace pcomp
