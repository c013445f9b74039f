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

#ifndef PCOMP_LABELS_HPP_
#define PCOMP_LABELS_HPP_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcomp/ingest.hpp"
#include "pcomp/matrix.hpp"

namespace pcomp {

// Median of pooled body-language-and-voice scores over both recording rounds
// of the original corpus.
inline constexpr double kDefaultCompetenceThreshold = 2.83;

enum class CompetenceClass { kLow = 0, kHigh = 1 };

std::string_view class_name(CompetenceClass c);

struct DiscretizationRule {
  double threshold = kDefaultCompetenceThreshold;
};

struct CompetenceTarget {
  std::string video_id;
  double score = 0.0;
  std::optional<CompetenceClass> class_label;
};

// Mean over raters per item, then mean over items 10..15. Throws InputError
// when an item has no rating for the video.
double competence_score(const RatingTable& ratings, std::string_view video_id);

double compute_median_threshold(std::span<const double> scores);

// High iff score >= threshold.
CompetenceClass discretize(double score, const DiscretizationRule& rule);

// Two-way, absolute-agreement, average-measures intraclass correlation of a
// targets x raters matrix:
//   (MS_rows - MS_error) / (MS_rows + (MS_cols - MS_error) / n_rows)
// Throws DomainError when fewer than 2 targets or raters, when a cell is not
// finite, or when the coefficient is undefined (zero denominator).
double icc_a_k(const Matrix& ratings);

// targets x raters matrix for one item; every listed video must be rated by
// every rater. Missing cells are rejected (InputError), not imputed.
Matrix rating_matrix(const RatingTable& ratings, std::span<const std::string> video_ids,
                     int item);

std::vector<CompetenceTarget> compute_targets(const RatingTable& ratings,
                                              std::span<const std::string> video_ids,
                                              std::optional<DiscretizationRule> rule);

// Columns: video_id, score, class_label, threshold_used.
void write_targets_csv(std::span<const CompetenceTarget> targets, double threshold,
                       const std::filesystem::path& path);

}  // namespace pcomp

#endif  // PCOMP_LABELS_HPP_
