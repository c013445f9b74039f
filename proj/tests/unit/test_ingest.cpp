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

#include <gtest/gtest.h>

#include "pcomp/error.hpp"
#include "pcomp/ingest.hpp"
#include "test_helpers.hpp"

namespace pcomp {
namespace {

using testing::TempDir;
using testing::write_file;

std::string table_csv(Modality m, int rows, double fps, bool with_conf,
                      double low_conf_every = 0, std::vector<std::string> drop = {}) {
  std::string out = "t";
  if (with_conf) out += ",confidence";
  std::vector<std::string> cols;
  for (const auto& c : schema::columns(m)) {
    if (std::find(drop.begin(), drop.end(), c) == drop.end()) cols.push_back(c);
  }
  for (const auto& c : cols) out += "," + c;
  out += "\n";
  for (int r = 0; r < rows; ++r) {
    out += std::to_string(r / fps);
    if (with_conf) {
      const bool low = low_conf_every > 0 && r % static_cast<int>(low_conf_every) == 0;
      out += low ? ",0.1" : ",0.95";
    }
    for (std::size_t c = 0; c < cols.size(); ++c) out += "," + std::to_string(0.01 * (r + c));
    out += "\n";
  }
  return out;
}

std::string ratings_csv(const std::vector<std::string>& videos, int raters,
                        std::vector<int> items = {}) {
  if (items.empty()) {
    for (int i = 1; i <= kItemCount; ++i) items.push_back(i);
  }
  std::string out = "video_id,rater_id,item,rating\n";
  for (const auto& v : videos) {
    for (int r = 0; r < raters; ++r) {
      for (int i : items) out += v + ",r" + std::to_string(r) + "," + std::to_string(i) + ",3\n";
    }
  }
  return out;
}

// Writes a complete two-video dataset and returns the manifest path.
std::filesystem::path write_dataset(const TempDir& dir, bool with_ratings_entry = true) {
  for (const char* v : {"v01", "v02"}) {
    write_file(dir / ("speech/" + std::string(v) + ".csv"), table_csv(Modality::kSpeech, 3, 0.25, false));
    write_file(dir / ("face/" + std::string(v) + ".csv"), table_csv(Modality::kFace, 100, 5, true));
    write_file(dir / ("pose/" + std::string(v) + ".csv"), table_csv(Modality::kPose, 100, 5, true));
  }
  write_file(dir / "ratings.csv", ratings_csv({"v01", "v02"}, 4));
  std::string m = R"({"dataset_tag": "T1", )";
  if (with_ratings_entry) m += R"("ratings": "ratings.csv", )";
  m += R"("videos": [
    {"video_id": "v01", "person_id": "p1", "duration_s": 20, "fps": 5,
     "speech": "speech/v01.csv", "face": "face/v01.csv", "pose": "pose/v01.csv"},
    {"video_id": "v02", "person_id": "p2", "duration_s": 20, "fps": 5,
     "speech": "speech/v02.csv", "face": "face/v02.csv", "pose": "pose/v02.csv"}]})";
  write_file(dir / "manifest.json", m);
  return dir / "manifest.json";
}

TEST(LoadManifest, ParsesVideosAndResolvesPaths) {
  TempDir dir;
  const Manifest m = load_manifest(write_dataset(dir));
  ASSERT_EQ(m.videos.size(), 2u);
  EXPECT_EQ(m.dataset_tag, DatasetTag::kT1);
  EXPECT_EQ(m.videos[1].person_id, "p2");
  EXPECT_TRUE(m.videos[0].has(Modality::kPose));
  EXPECT_EQ(m.videos[0].modality_paths.at(Modality::kFace), (dir / "face/v01.csv").lexically_normal());
  ASSERT_TRUE(m.ratings_path);
  EXPECT_TRUE(std::filesystem::exists(*m.ratings_path));
}

TEST(LoadManifest, DuplicateVideoIdIsRejected) {
  TempDir dir;
  write_file(dir / "m.json", R"({"dataset_tag": "T1", "videos": [
    {"video_id": "v01", "person_id": "p1", "duration_s": 20, "speech": "a.csv"},
    {"video_id": "v01", "person_id": "p2", "duration_s": 20, "speech": "b.csv"}]})");
  try {
    load_manifest(dir / "m.json");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("v01"), std::string::npos);
  }
}

TEST(LoadManifest, ReportsParseLocationAndMissingFields) {
  TempDir dir;
  write_file(dir / "bad.json", "{\n  \"dataset_tag\": \"T1\",\n  \"videos\": [\n");
  try {
    load_manifest(dir / "bad.json");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
  }
  write_file(dir / "missing.json", R"({"dataset_tag": "T1", "videos": [{"video_id": "v1", "duration_s": 3, "speech": "a.csv"}]})");
  try {
    load_manifest(dir / "missing.json");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("person_id"), std::string::npos);
  }
}

TEST(LoadManifest, RoundTripsThroughWriter) {
  TempDir dir;
  const Manifest m = load_manifest(write_dataset(dir));
  write_manifest(m, dir / "copy.json");
  const Manifest again = load_manifest(dir / "copy.json");
  ASSERT_EQ(again.videos.size(), m.videos.size());
  EXPECT_EQ(again.videos[1].modality_paths, m.videos[1].modality_paths);
  EXPECT_EQ(again.ratings_path, m.ratings_path);
}

TEST(LoadFeatureTable, PoseTableMatchesSchema) {
  TempDir dir;
  write_file(dir / "p.csv", table_csv(Modality::kPose, 10, 5, false));
  const FeatureTable t = load_feature_table(dir / "p.csv", Modality::kPose);
  EXPECT_EQ(t.cols(), 30u);
  EXPECT_EQ(t.rows(), 10u);
  EXPECT_TRUE(t.confidence.empty());
}

TEST(LoadFeatureTable, FaceTableWithMissingColumnsNamesThem) {
  TempDir dir;
  write_file(dir / "f.csv", table_csv(Modality::kFace, 5, 5, false, 0, {"AU45_r", "gaze_z"}));
  try {
    load_feature_table(dir / "f.csv", Modality::kFace);
    FAIL();
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("AU45_r"), std::string::npos);
    EXPECT_NE(msg.find("gaze_z"), std::string::npos);
  }
}

TEST(LoadFeatureTable, LowConfidenceRowsAreDroppedAndCounted) {
  TempDir dir;
  write_file(dir / "f.csv", table_csv(Modality::kFace, 100, 5, true, 10));
  const FeatureTable t = load_feature_table(dir / "f.csv", Modality::kFace);
  EXPECT_EQ(t.rows_total, 100u);
  EXPECT_EQ(t.rows_dropped, 10u);
  EXPECT_EQ(t.rows(), 90u);
  EXPECT_DOUBLE_EQ(t.coverage_ratio(), 0.9);
  for (double c : t.confidence) EXPECT_GE(c, 0.5);
}

TEST(LoadFeatureTable, PermutedColumnsAreNormalized) {
  TempDir dir;
  const auto& cols = schema::columns(Modality::kPose);
  std::string text = "t";
  for (auto it = cols.rbegin(); it != cols.rend(); ++it) text += "," + *it;
  text += "\n0";
  for (std::size_t i = 0; i < cols.size(); ++i) text += "," + std::to_string(cols.size() - 1 - i);
  text += "\n";
  write_file(dir / "p.csv", text);
  const FeatureTable t = load_feature_table(dir / "p.csv", Modality::kPose);
  for (std::size_t c = 0; c < cols.size(); ++c) EXPECT_EQ(t.at(0, c), static_cast<double>(c));
}

TEST(LoadFeatureTable, RejectsNonMonotonicTimestampsAndEmptyResult) {
  TempDir dir;
  std::string text = table_csv(Modality::kPose, 3, 5, false);
  // Swap the timestamps of rows 1 and 2.
  auto l1 = text.find("\n0.2");
  text.replace(l1 + 1, 3, "0.9");
  write_file(dir / "p.csv", text);
  EXPECT_THROW(load_feature_table(dir / "p.csv", Modality::kPose), InputError);
  write_file(dir / "e.csv", table_csv(Modality::kPose, 3, 5, true, 1));
  EXPECT_THROW(load_feature_table(dir / "e.csv", Modality::kPose), InputError);
}

TEST(LoadFeatureTable, WriteThenLoadIsLossless) {
  TempDir dir;
  write_file(dir / "f.csv", table_csv(Modality::kFace, 20, 5, true));
  const FeatureTable t = load_feature_table(dir / "f.csv", Modality::kFace);
  write_feature_table(t, dir / "g.csv");
  const FeatureTable u = load_feature_table(dir / "g.csv", Modality::kFace);
  EXPECT_EQ(t.values, u.values);
  EXPECT_EQ(t.timestamps, u.timestamps);
  EXPECT_EQ(t.confidence, u.confidence);
}

TEST(LoadRatings, ParsesFullGrid) {
  TempDir dir;
  write_file(dir / "r.csv", ratings_csv({"v1"}, 4));
  const RatingTable r = load_ratings(dir / "r.csv");
  EXPECT_EQ(r.size(), 88u);
  EXPECT_EQ(r.ratings("v1", 12).size(), 4u);
  EXPECT_EQ(r.rater_ids().size(), 4u);
}

TEST(LoadRatings, RangeAndItemErrors) {
  TempDir dir;
  write_file(dir / "r5.csv", "video_id,rater_id,item,rating\nv1,r1,10,5\n");
  EXPECT_THROW(load_ratings(dir / "r5.csv"), InputError);
  write_file(dir / "i23.csv", "video_id,rater_id,item,rating\nv1,r1,23,3\n");
  try {
    load_ratings(dir / "i23.csv");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("item"), std::string::npos);
  }
}

TEST(ValidateDataset, CompleteDatasetPasses) {
  TempDir dir;
  const Manifest m = load_manifest(write_dataset(dir));
  const ValidationReport r = validate_dataset(m, load_ratings(*m.ratings_path));
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.issues.empty());
  ASSERT_EQ(r.videos.size(), 2u);
  EXPECT_DOUBLE_EQ(r.videos[0].coverage.at(Modality::kFace), 1.0);
}

TEST(ValidateDataset, MissingPoseFileIsReported) {
  TempDir dir;
  const Manifest m = load_manifest(write_dataset(dir));
  std::filesystem::remove(dir / "pose/v02.csv");
  const ValidationReport r = validate_dataset(m, load_ratings(*m.ratings_path));
  EXPECT_FALSE(r.pass);
  ASSERT_FALSE(r.issues.empty());
  EXPECT_NE(r.issues[0].find("pose table missing for v02"), std::string::npos);
}

TEST(ValidateDataset, MissingItemsAreListed) {
  TempDir dir;
  const Manifest m = load_manifest(write_dataset(dir));
  write_file(dir / "partial.csv", ratings_csv({"v01"}, 2) + ratings_csv({"v02"}, 2, {10, 11, 12}).substr(30));
  const ValidationReport r = validate_dataset(m, load_ratings(dir / "partial.csv"));
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.videos[1].missing_items, (std::vector<int>{13, 14, 15}));
}

TEST(ValidateDataset, DurationMismatchIsAnIssue) {
  TempDir dir;
  write_dataset(dir);
  std::string m = testing::read_file(dir / "manifest.json");
  m.replace(m.find("\"duration_s\": 20"), 16, "\"duration_s\": 40");
  write_file(dir / "manifest.json", m);
  const Manifest man = load_manifest(dir / "manifest.json");
  const ValidationReport r = validate_dataset(man, load_ratings(*man.ratings_path));
  EXPECT_FALSE(r.pass);
}

}  // namespace
}  // namespace pcomp
