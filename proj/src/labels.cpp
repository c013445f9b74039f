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

#include "pcomp/labels.hpp"

#include <cmath>
#include <string>

#include "pcomp/error.hpp"
#include "pcomp/stats.hpp"
#include "util.hpp"

namespace pcomp {

std::string_view class_name(CompetenceClass c) {
  return c == CompetenceClass::kHigh ? "high" : "low";
}

double competence_score(const RatingTable& ratings, std::string_view video_id) {
  double sum = 0.0;
  for (int item = kFirstCompetenceItem; item <= kLastCompetenceItem; ++item) {
    const std::vector<int> r = ratings.ratings(video_id, item);
    if (r.empty()) {
      throw InputError("video " + std::string(video_id) + " has no rating for item " +
                       std::to_string(item));
    }
    double item_sum = 0.0;
    for (int v : r) item_sum += v;
    sum += item_sum / static_cast<double>(r.size());
  }
  return sum / static_cast<double>(kLastCompetenceItem - kFirstCompetenceItem + 1);
}

double compute_median_threshold(std::span<const double> scores) {
  if (scores.empty()) throw DomainError("median threshold of an empty score list");
  return stats::median(scores);
}

CompetenceClass discretize(double score, const DiscretizationRule& rule) {
  return score >= rule.threshold ? CompetenceClass::kHigh : CompetenceClass::kLow;
}

double icc_a_k(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t k = x.cols();
  if (n < 2 || k < 2) throw DomainError("ICC needs at least 2 targets and 2 raters");
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw DomainError("ICC input contains a missing or non-finite cell");
  }
  std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      row_mean[i] += x(i, j);
      col_mean[j] += x(i, j);
      grand += x(i, j);
    }
  }
  for (double& m : row_mean) m /= static_cast<double>(k);
  for (double& m : col_mean) m /= static_cast<double>(n);
  grand /= static_cast<double>(n * k);

  double ss_rows = 0.0, ss_cols = 0.0, ss_err = 0.0;
  for (double m : row_mean) ss_rows += (m - grand) * (m - grand);
  ss_rows *= static_cast<double>(k);
  for (double m : col_mean) ss_cols += (m - grand) * (m - grand);
  ss_cols *= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double e = x(i, j) - row_mean[i] - col_mean[j] + grand;
      ss_err += e * e;
    }
  }
  const double ms_rows = ss_rows / static_cast<double>(n - 1);
  const double ms_cols = ss_cols / static_cast<double>(k - 1);
  const double ms_err = ss_err / static_cast<double>((n - 1) * (k - 1));
  const double denom = ms_rows + (ms_cols - ms_err) / static_cast<double>(n);
  if (!(std::abs(denom) > 0.0)) {
    throw DomainError("ICC undefined: no variance between targets or raters");
  }
  return (ms_rows - ms_err) / denom;
}

Matrix rating_matrix(const RatingTable& ratings, std::span<const std::string> video_ids,
                     int item) {
  const std::vector<std::string> raters = ratings.rater_ids();
  Matrix m(video_ids.size(), raters.size());
  for (std::size_t i = 0; i < video_ids.size(); ++i) {
    const auto* by = ratings.by_rater(video_ids[i], item);
    for (std::size_t j = 0; j < raters.size(); ++j) {
      if (by == nullptr || by->count(raters[j]) == 0) {
        throw InputError("rater " + raters[j] + " has no rating for video " + video_ids[i] +
                         " item " + std::to_string(item));
      }
      m(i, j) = by->at(raters[j]);
    }
  }
  return m;
}

std::vector<CompetenceTarget> compute_targets(const RatingTable& ratings,
                                              std::span<const std::string> video_ids,
                                              std::optional<DiscretizationRule> rule) {
  std::vector<CompetenceTarget> out;
  out.reserve(video_ids.size());
  for (const auto& id : video_ids) {
    CompetenceTarget t;
    t.video_id = id;
    t.score = competence_score(ratings, id);
    if (rule) t.class_label = discretize(t.score, *rule);
    out.push_back(std::move(t));
  }
  return out;
}

void write_targets_csv(std::span<const CompetenceTarget> targets, double threshold,
                       const std::filesystem::path& path) {
  std::string out = "video_id,score,class_label,threshold_used\n";
  for (const auto& t : targets) {
    out += t.video_id + "," + util::format_double(t.score) + ",";
    if (t.class_label) out += std::string(class_name(*t.class_label));
    out += "," + util::format_double(threshold) + "\n";
  }
  util::write_text_file(path, out);
}

}  // namespace pcomp
