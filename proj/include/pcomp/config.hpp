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

#ifndef PCOMP_CONFIG_HPP_
#define PCOMP_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pcomp/features.hpp"
#include "pcomp/fusion.hpp"
#include "pcomp/labels.hpp"
#include "pcomp/models.hpp"
#include "pcomp/schema.hpp"

namespace pcomp {

enum class FeatureScope { kGlobal, kLocal };
enum class ThresholdMode { kFixed, kRecompute };

std::string_view scope_name(FeatureScope s);  // "global", "local"
FeatureScope parse_scope(std::string_view name);

// Everything that determines the numbers a run produces, plus where to write
// them. Defaults reproduce the full experiment grid.
struct RunConfig {
  std::filesystem::path train_manifest;
  // Default to the manifest's "ratings" entry.
  std::optional<std::filesystem::path> train_ratings;
  // Present for cross-dataset runs.
  std::optional<std::filesystem::path> test_manifest;
  std::optional<std::filesystem::path> test_ratings;

  std::vector<Modality> modalities{kAllModalities.begin(), kAllModalities.end()};
  std::vector<FeatureScope> scopes{FeatureScope::kGlobal, FeatureScope::kLocal};
  double window_s = kDefaultWindowSeconds;
  std::vector<Functional> functionals = default_functionals();
  std::vector<Family> families{kAllFamilies.begin(), kAllFamilies.end()};
  std::vector<FusionRule> fusion_rules{FusionRule::kFeature, FusionRule::kLateMedian,
                                       FusionRule::kLateProduct, FusionRule::kLateSum};
  std::vector<Task> tasks{Task::kClassification, Task::kRegression};
  int k = 10;
  std::uint64_t fold_seed = 42;
  std::uint64_t model_seed = 42;
  ThresholdMode threshold_mode = ThresholdMode::kFixed;
  double threshold = kDefaultCompetenceThreshold;
  double confidence_threshold = kDefaultConfidenceThreshold;
  bool normalize_pose = true;
  Hyperparameters hp;

  // Neither affects results; both are left out of the fingerprint.
  std::filesystem::path output_dir;
  int workers = 0;  // 0 = all available cores

  bool cross_dataset() const { return test_manifest.has_value(); }
};

nlohmann::json config_to_json(const RunConfig& config);
// Missing keys keep their defaults; unknown keys are rejected. Relative paths
// resolve against `base_dir`.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Throws InputError naming every invalid field.
void validate_config(const RunConfig& config);

// 16 hex digits: FNV-1a over the canonical JSON of the result-relevant fields.
std::string config_fingerprint(const RunConfig& config);

}  // namespace pcomp

#endif  // PCOMP_CONFIG_HPP_
