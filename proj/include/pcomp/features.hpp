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

#ifndef PCOMP_FEATURES_HPP_
#define PCOMP_FEATURES_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcomp/ingest.hpp"
#include "pcomp/matrix.hpp"

namespace pcomp {

inline constexpr double kDefaultWindowSeconds = 16.0;

enum class Functional { kMean, kStd, kMin, kMax, kRange, kMedian };

std::string_view functional_name(Functional f);
Functional parse_functional(std::string_view name);
// {mean, population std, min, max}.
std::vector<Functional> default_functionals();

struct Window {
  int index = 0;
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const Window&) const = default;
};

struct WindowPlan {
  std::vector<Window> windows;
  // Set when the span was shorter than half a window and a single window
  // covering the whole span was emitted instead.
  bool fallback = false;
};

// Non-overlapping windows of `window_s` over [start_s, end_s); the trailing
// remainder is kept iff it is at least window_s / 2.
WindowPlan plan_windows(double start_s, double end_s, double window_s);

struct WindowSlice {
  Window window;
  FeatureTable table;
  bool fallback = false;
};

// Splits a table by timestamp. The span runs from the first timestamp to the
// last timestamp plus one median row step.
std::vector<WindowSlice> segment_windows(const FeatureTable& table, double window_s);
// Splits a table over an explicit plan. Windows that receive no rows are
// omitted.
std::vector<WindowSlice> segment_windows(const FeatureTable& table, const WindowPlan& plan);

struct FeatureVector {
  std::string video_id;
  // "speech", "face", "pose" or "fused".
  std::string modality;
  // Empty for the global (whole-video) scope.
  std::optional<Window> window;
  std::vector<double> values;
  std::vector<std::string> names;

  bool is_global() const { return !window.has_value(); }
};

// Applies each functional to each column, column-major over (column,
// functional). Speech tables already hold functionals: one row passes through
// and several rows are averaged.
FeatureVector aggregate(const FeatureTable& table, std::span<const Functional> functionals,
                        std::string video_id = {}, std::optional<Window> window = std::nullopt);

// Translates every frame so the neck is the origin and scales by the shoulder
// distance. Frames with a degenerate shoulder distance are dropped and counted
// in rows_dropped.
FeatureTable normalize_pose(const FeatureTable& table);

class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(std::vector<double> means, std::vector<double> stds);

  static Standardizer fit(const Matrix& x);

  std::size_t dims() const { return means_.size(); }
  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& stds() const { return stds_; }
  std::vector<std::size_t> constant_dims() const;

  std::vector<double> transform(std::span<const double> v) const;
  Matrix transform(const Matrix& x) const;

 private:
  std::vector<double> means_;
  std::vector<double> stds_;
};

Standardizer fit_standardizer(std::span<const FeatureVector> vectors);
FeatureVector apply_standardizer(const Standardizer& s, const FeatureVector& v);

// Stacks vector values into a matrix; all vectors must share one length.
Matrix to_matrix(std::span<const FeatureVector> vectors);

// One row per vector: video_id, modality, scope, window_index, start_s, end_s,
// then the feature columns of the first vector.
void write_vectors_csv(std::span<const FeatureVector> vectors,
                       const std::filesystem::path& path);

struct VideoFeatures {
  std::string video_id;
  FeatureVector global;
  std::vector<FeatureVector> windows;
};

struct ExtractionOptions {
  double window_s = kDefaultWindowSeconds;
  std::vector<Functional> functionals = default_functionals();
  bool normalize_pose = true;
};

// Global and windowed vectors for one modality table of one video; windows are
// laid out over [0, duration_s) so that every modality of a video shares them.
VideoFeatures extract_features(const FeatureTable& table, std::string_view video_id,
                               double duration_s, const ExtractionOptions& options);

}  // namespace pcomp

#endif  // PCOMP_FEATURES_HPP_
