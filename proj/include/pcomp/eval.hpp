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

#ifndef PCOMP_EVAL_HPP_
#define PCOMP_EVAL_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcomp/config.hpp"
#include "pcomp/features.hpp"
#include "pcomp/ingest.hpp"
#include "pcomp/labels.hpp"
#include "pcomp/models.hpp"

namespace pcomp {

// ---------------------------------------------------------------------------
// Folds

struct FoldInput {
  std::string video_id;
  std::string person_id;
  CompetenceClass label = CompetenceClass::kLow;
};

class FoldPlan {
 public:
  FoldPlan() = default;
  FoldPlan(int k, std::uint64_t seed, std::map<std::string, int> assignment);

  int k() const { return k_; }
  std::uint64_t seed() const { return seed_; }
  const std::map<std::string, int>& assignment() const { return assignment_; }
  // Throws InputError for unknown ids.
  int fold_of(std::string_view video_id) const;
  std::vector<std::string> members(int fold) const;

 private:
  int k_ = 0;
  std::uint64_t seed_ = 0;
  std::map<std::string, int> assignment_;
};

// Person-grouped, class-stratified k-fold assignment. Deterministic per seed.
FoldPlan make_folds(std::span<const FoldInput> videos, int k, std::uint64_t seed);
// Seeded shuffle split into k near-equal folds, without grouping.
FoldPlan make_shuffle_folds(std::span<const std::string> video_ids, int k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Video-level aggregation and metrics

// Majority label; ties go to the class with the higher mean probability, then
// to kLow. `window_probs` may be empty.
CompetenceClass video_vote(std::span<const CompetenceClass> window_preds,
                           std::span<const ClassProbs> window_probs = {});
double video_median(std::span<const double> window_preds);

struct ClassificationMetrics {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  double accuracy = 0.0;
  // Absent when the denominator is zero.
  std::optional<double> precision;
  std::optional<double> recall;
  // 0 when precision or recall is absent or both are zero.
  double f1 = 0.0;
};

// Positive class is kHigh.
ClassificationMetrics classification_metrics(std::span<const CompetenceClass> y_true,
                                             std::span<const CompetenceClass> y_pred);
double mse(std::span<const double> y_true, std::span<const double> y_hat);
// Throws DomainError when either input is constant.
double pearson_r(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Result tables

enum class Protocol { kSameDataset, kCrossDataset };
std::string_view protocol_name(Protocol p);  // "same-dataset", "cross-dataset"

struct CellKey {
  Protocol protocol = Protocol::kSameDataset;
  FeatureScope scope = FeatureScope::kGlobal;
  Task task = Task::kClassification;
  // "speech", "face", "pose" or a '+'-joined set for fused cells.
  std::string modalities;
  Family family = Family::kGB;
  // "none" for single-modality cells, else a fusion rule name.
  std::string fusion = "none";

  auto operator<=>(const CellKey&) const = default;
};

struct FoldMetrics {
  int fold = 0;
  std::optional<double> accuracy, precision, recall, f1, mse;
};

struct ResultRow {
  CellKey key;
  std::vector<FoldMetrics> folds;
  // Pearson r over all pooled video-level predictions (regression only).
  std::optional<double> pearson_r;
  int undefined_precision_folds = 0;
  int fusion_ties = 0;
  bool failed = false;
  std::string error;
};

struct MetricSummary {
  double mean = 0.0;
  // Population standard deviation over the folds that define the metric.
  double std = 0.0;
  std::size_t n = 0;
};

// Absent when no fold defines the metric.
std::optional<MetricSummary> summarize(const ResultRow& row,
                                       std::optional<double> FoldMetrics::*metric);

struct ResultTable {
  std::string fingerprint;
  std::vector<ResultRow> rows;

  const ResultRow* find(const CellKey& key) const;
};

// Long format: one line per (cell, fold) plus a "pooled" line per regression
// cell carrying Pearson r.
void write_folds_csv(const ResultTable& table, const std::filesystem::path& path);
ResultTable read_folds_csv(const std::filesystem::path& path);
// One line per cell with means and standard deviations.
void write_results_csv(const ResultTable& table, const std::filesystem::path& path);
std::string render_markdown(const ResultTable& table);

// ---------------------------------------------------------------------------
// Experiments

struct VideoData {
  std::string video_id;
  std::string person_id;
  double score = 0.0;
  // Indexed by modality; only modalities selected by the config are filled.
  std::map<Modality, VideoFeatures> features;
  // Window indices available for every selected modality.
  std::vector<int> common_windows;
};

struct PreparedDataset {
  Manifest manifest;
  std::vector<VideoData> videos;
};

// Loads ratings and tables and extracts global and windowed vectors for the
// modalities selected by `config`.
PreparedDataset prepare_dataset(const std::filesystem::path& manifest_path,
                                const std::optional<std::filesystem::path>& ratings_path,
                                const RunConfig& config);

struct TrainEvent {
  Protocol protocol = Protocol::kSameDataset;
  FeatureScope scope = FeatureScope::kGlobal;
  Task task = Task::kClassification;
  Family family = Family::kGB;
  std::string feature_set;
  int fold = -1;  // -1 for the single cross-dataset training
  std::size_t samples = 0;
};

struct FoldEvent {
  Protocol protocol = Protocol::kSameDataset;
  FeatureScope scope = FeatureScope::kGlobal;
  int fold = 0;
  // Video id of every training / test sample (windows repeat their video).
  std::vector<std::string> train_samples;
  std::vector<std::string> test_samples;
};

// Observers for protocol checks; may be invoked from worker threads.
struct RunHooks {
  std::function<void(const TrainEvent&)> on_train;
  std::function<void(const FoldEvent&)> on_fold;
};

struct VideoPrediction {
  CellKey key;
  int fold = 0;
  std::string video_id;
  double true_score = 0.0;
  std::optional<CompetenceClass> true_class;
  std::optional<CompetenceClass> predicted_class;
  std::optional<double> prob_high;
  std::optional<double> predicted_value;
  std::size_t windows = 1;
};

struct WindowPrediction {
  CellKey key;
  int fold = 0;
  std::string video_id;
  Window window;
  std::optional<CompetenceClass> predicted_class;
  std::optional<double> prob_high;
  std::optional<double> predicted_value;
};

struct RunOutput {
  ResultTable table;
  std::vector<VideoPrediction> videos;
  std::vector<WindowPrediction> windows;
  FoldPlan plan;
  double threshold = kDefaultCompetenceThreshold;
  std::vector<std::string> notes;
};

RunOutput run_same_dataset(const RunConfig& config, const PreparedDataset& data,
                           const RunHooks& hooks = {});
// Trains once per cell on all of `train` and evaluates on k shuffle folds of
// `test`. Throws InputError when the sets share some but not all video ids;
// identical sets are allowed and noted as a degenerate overlap.
RunOutput run_cross_dataset(const RunConfig& config, const PreparedDataset& train,
                            const PreparedDataset& test, const RunHooks& hooks = {});

// Both dumps lead with a fingerprint column.
void write_video_predictions_csv(std::span<const VideoPrediction> rows,
                                 std::string_view fingerprint, const std::filesystem::path& path);
void write_window_predictions_csv(std::span<const WindowPrediction> rows,
                                  std::string_view fingerprint, const std::filesystem::path& path);

}  // namespace pcomp

#endif  // PCOMP_EVAL_HPP_
