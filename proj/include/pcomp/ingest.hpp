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

#ifndef PCOMP_INGEST_HPP_
#define PCOMP_INGEST_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcomp/schema.hpp"

namespace pcomp {

enum class DatasetTag { kT1, kT2 };

std::string_view dataset_tag_name(DatasetTag tag);

struct VideoRecord {
  std::string video_id;
  std::string person_id;
  double duration_s = 0.0;
  double fps = 0.0;
  std::map<Modality, std::filesystem::path> modality_paths;

  bool has(Modality m) const { return modality_paths.count(m) != 0; }
};

struct Manifest {
  DatasetTag dataset_tag = DatasetTag::kT1;
  std::vector<VideoRecord> videos;
  // Optional ratings file declared next to the video list.
  std::optional<std::filesystem::path> ratings_path;
  std::filesystem::path source;

  const VideoRecord* find(std::string_view video_id) const;
};

// Parses a JSON manifest. Relative paths are resolved against the manifest's
// directory. Referenced files are not opened here; see validate_dataset.
Manifest load_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

inline constexpr double kDefaultConfidenceThreshold = 0.5;

// A per-frame (face, pose) or per-window (speech) table of one modality for
// one video, with columns in canonical schema order.
struct FeatureTable {
  Modality modality = Modality::kFace;
  std::vector<std::string> columns;
  std::vector<double> timestamps;
  // rows() x columns.size(), row-major.
  std::vector<double> values;
  // Empty when the source had no confidence column.
  std::vector<double> confidence;
  // Rows in the source file, and how many were dropped for low confidence.
  std::size_t rows_total = 0;
  std::size_t rows_dropped = 0;

  std::size_t rows() const { return timestamps.size(); }
  std::size_t cols() const { return columns.size(); }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols(), cols()};
  }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  double coverage_ratio() const {
    return rows_total == 0 ? 0.0
                           : static_cast<double>(rows_total - rows_dropped) /
                                 static_cast<double>(rows_total);
  }
};

struct TableLoadOptions {
  double confidence_threshold = kDefaultConfidenceThreshold;
};

FeatureTable load_feature_table(const std::filesystem::path& path, Modality modality,
                                const TableLoadOptions& options = {});
// Writes `t` (retained rows only) in the same CSV layout load_feature_table reads.
void write_feature_table(const FeatureTable& table, const std::filesystem::path& path);

inline constexpr int kItemCount = 22;
inline constexpr int kFirstCompetenceItem = 10;
inline constexpr int kLastCompetenceItem = 15;

struct RatingEntry {
  std::string video_id;
  std::string rater_id;
  int item = 0;
  int rating = 0;
};

class RatingTable {
 public:
  RatingTable() = default;
  explicit RatingTable(std::vector<RatingEntry> entries);

  std::span<const RatingEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // Ratings given to `item` of `video_id`, ordered by rater id. Empty if none.
  std::vector<int> ratings(std::string_view video_id, int item) const;
  // rater_id -> rating for one (video, item).
  const std::map<std::string, int>* by_rater(std::string_view video_id, int item) const;
  // Items with at least one rating for the video.
  std::vector<int> rated_items(std::string_view video_id) const;
  std::vector<std::string> video_ids() const;
  std::vector<std::string> rater_ids() const;

 private:
  std::vector<RatingEntry> entries_;
  std::map<std::string, std::map<int, std::map<std::string, int>>, std::less<>> index_;
};

RatingTable load_ratings(const std::filesystem::path& path);
void write_ratings(const RatingTable& ratings, const std::filesystem::path& path);

struct VideoValidation {
  std::string video_id;
  std::map<Modality, bool> present;
  std::map<Modality, double> coverage;
  std::vector<int> missing_items;
};

struct ValidationReport {
  bool pass = true;
  std::vector<std::string> issues;
  // Tables that could not be parsed at all; a subset of the issues.
  std::size_t unreadable_files = 0;
  std::vector<VideoValidation> videos;

  std::string to_json() const;
};

struct ValidationOptions {
  double confidence_threshold = kDefaultConfidenceThreshold;
  double duration_tolerance_s = 1.0;
  std::vector<Modality> required_modalities{kAllModalities.begin(), kAllModalities.end()};
};

// Never throws for data problems; every problem becomes an issue line.
ValidationReport validate_dataset(const Manifest& manifest, const RatingTable& ratings,
                                  const ValidationOptions& options = {});

}  // namespace pcomp

#endif  // PCOMP_INGEST_HPP_
