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

#ifndef PCOMP_SYNTH_HPP_
#define PCOMP_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pcomp/ingest.hpp"
#include "pcomp/schema.hpp"

namespace pcomp::synth {

struct Shift {
  // Applied to the modality's behavioral cue (in latent standard units).
  double offset = 0.0;
  double scale = 1.0;

  bool is_identity() const { return offset == 0.0 && scale == 1.0; }
};

struct SynthSpec {
  DatasetTag dataset_tag = DatasetTag::kT1;
  int n_videos = 160;
  int n_persons = 160;
  double duration_min_s = 150.0;
  double duration_max_s = 240.0;
  double fps = 5.0;
  // Correlation between each modality's behavioral cue and latent competence.
  std::map<Modality, double> signal_strength{
      {Modality::kSpeech, 0.7}, {Modality::kFace, 0.7}, {Modality::kPose, 0.7}};
  double rater_noise_sd = 0.3;
  int n_raters = 4;
  std::map<Modality, Shift> shift;
  // Fraction of face/pose frames emitted with a confidence below 0.5.
  double low_confidence_fraction = 0.02;
  std::uint64_t seed = 1;
  // Person ids to draw from instead of p000..; used for the second round.
  std::vector<std::string> person_pool;
  std::string video_prefix = "v";
};

nlohmann::json spec_to_json(const SynthSpec& spec);
SynthSpec spec_from_json(const nlohmann::json& j);
SynthSpec load_spec(const std::filesystem::path& path);

// Second-round settings derived from a first-round spec.
struct PairSpec {
  int n_persons = 91;
  std::map<Modality, Shift> shift;
  std::uint64_t seed = 2;
};

nlohmann::json pair_to_json(const PairSpec& pair);
PairSpec pair_from_json(const nlohmann::json& j);

struct SimulatedVideo {
  std::string video_id;
  std::string person_id;
  double duration_s = 0.0;
  // Latent competence in [1, 4].
  double latent = 0.0;
  std::map<Modality, FeatureTable> tables;
  std::vector<RatingEntry> ratings;
};

// Pure function of (spec, index).
SimulatedVideo simulate_video(const SynthSpec& spec, int index);

struct GeneratedDataset {
  std::filesystem::path manifest_path;
  std::filesystem::path ratings_path;
  std::vector<std::string> person_ids;
  // Pearson r between the per-video mean of items 10..15 and the latent.
  double rating_latent_r = 0.0;
};

// Writes manifest.json, ratings.csv and {speech,face,pose}/<video>.csv. Throws
// InputError for an unwritable directory or invalid spec, and DomainError when
// rater_noise_sd <= 0.3 but the rating/latent correlation falls below 0.9.
GeneratedDataset generate(const SynthSpec& spec, const std::filesystem::path& out_dir);

struct GeneratedPair {
  GeneratedDataset first;
  GeneratedDataset second;
};

// Writes <out_dir>/T1 and <out_dir>/T2. The second round draws its persons from
// the first round's and applies `pair.shift`.
GeneratedPair generate_pair(const SynthSpec& spec_t1, const PairSpec& pair,
                            const std::filesystem::path& out_dir);

}  // namespace pcomp::synth

#endif  // PCOMP_SYNTH_HPP_
