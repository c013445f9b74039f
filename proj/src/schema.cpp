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

#include "pcomp/schema.hpp"

#include <string>
#include <unordered_map>

#include "pcomp/error.hpp"

namespace pcomp {

std::string_view modality_name(Modality m) {
  switch (m) {
    case Modality::kSpeech: return "speech";
    case Modality::kFace: return "face";
    case Modality::kPose: return "pose";
  }
  return "?";
}

Modality parse_modality(std::string_view name) {
  if (name == "speech") return Modality::kSpeech;
  if (name == "face") return Modality::kFace;
  if (name == "pose") return Modality::kPose;
  throw InputError("unknown modality '" + std::string(name) + "'");
}

namespace schema {
namespace {

std::vector<std::string> speech_columns() {
  std::vector<std::string> c;
  const auto add_lld = [&](const std::string& lld, bool full) {
    c.push_back(lld + "_amean");
    c.push_back(lld + "_stddevNorm");
    if (!full) return;
    for (const char* s : {"_percentile20.0", "_percentile50.0", "_percentile80.0",
                          "_pctlrange0-2", "_meanRisingSlope", "_stddevRisingSlope",
                          "_meanFallingSlope", "_stddevFallingSlope"}) {
      c.push_back(lld + s);
    }
  };
  // Frequency and energy descriptors over all frames.
  add_lld("F0semitoneFrom27.5Hz_sma3nz", true);
  add_lld("loudness_sma3", true);
  add_lld("spectralFlux_sma3", false);
  for (int k = 1; k <= 4; ++k) add_lld("mfcc" + std::to_string(k) + "_sma3", false);
  add_lld("jitterLocal_sma3nz", false);
  add_lld("shimmerLocaldB_sma3nz", false);
  add_lld("HNRdBACF_sma3nz", false);
  add_lld("logRelF0-H1-H2_sma3nz", false);
  add_lld("logRelF0-H1-A3_sma3nz", false);
  for (int k = 1; k <= 3; ++k) {
    const std::string f = "F" + std::to_string(k);
    add_lld(f + "frequency_sma3nz", false);
    add_lld(f + "bandwidth_sma3nz", false);
    add_lld(f + "amplitudeLogRelF0_sma3nz", false);
  }
  // Voiced segments.
  add_lld("alphaRatioV_sma3nz", false);
  add_lld("hammarbergIndexV_sma3nz", false);
  add_lld("slopeV0-500_sma3nz", false);
  add_lld("slopeV500-1500_sma3nz", false);
  add_lld("spectralFluxV_sma3nz", false);
  for (int k = 1; k <= 4; ++k) add_lld("mfcc" + std::to_string(k) + "V_sma3nz", false);
  // Unvoiced segments: means only.
  for (const char* s : {"alphaRatioUV_sma3nz_amean", "hammarbergIndexUV_sma3nz_amean",
                        "slopeUV0-500_sma3nz_amean", "slopeUV500-1500_sma3nz_amean",
                        "spectralFluxUV_sma3nz_amean"}) {
    c.emplace_back(s);
  }
  // Temporal descriptors.
  for (const char* s : {"loudnessPeaksPerSec", "VoicedSegmentsPerSec",
                        "MeanVoicedSegmentLengthSec", "StddevVoicedSegmentLengthSec",
                        "MeanUnvoicedSegmentLength", "StddevUnvoicedSegmentLength",
                        "equivalentSoundLevel_dBp"}) {
    c.emplace_back(s);
  }
  return c;
}

std::vector<std::string> face_columns() {
  std::vector<std::string> c = {"pose_Tx", "pose_Ty", "pose_Tz", "pose_Rx", "pose_Ry",
                                "pose_Rz", "gaze_x",  "gaze_y",  "gaze_z"};
  const auto au = [](int k) {
    std::string s = "AU";
    if (k < 10) s += '0';
    return s + std::to_string(k);
  };
  for (int k : kActionUnits) c.push_back(au(k) + "_c");
  for (int k : kActionUnits) c.push_back(au(k) + "_r");
  return c;
}

std::vector<std::string> pose_columns() {
  std::vector<std::string> c;
  for (std::size_t k = 0; k < kPoseJoints; ++k) {
    c.push_back("j" + std::to_string(k) + "_x");
    c.push_back("j" + std::to_string(k) + "_y");
  }
  return c;
}

struct Schemas {
  std::vector<std::string> cols[3];
  std::unordered_map<std::string, int> index[3];

  Schemas() {
    cols[0] = speech_columns();
    cols[1] = face_columns();
    cols[2] = pose_columns();
    for (int m = 0; m < 3; ++m) {
      for (std::size_t i = 0; i < cols[m].size(); ++i) index[m][cols[m][i]] = static_cast<int>(i);
    }
  }
};

const Schemas& schemas() {
  static const Schemas s;
  return s;
}

}  // namespace

const std::vector<std::string>& columns(Modality m) {
  return schemas().cols[static_cast<int>(m)];
}

int column_index(Modality m, std::string_view name) {
  const auto& idx = schemas().index[static_cast<int>(m)];
  auto it = idx.find(std::string(name));
  return it == idx.end() ? -1 : it->second;
}

}  // namespace schema
}  // namespace pcomp
