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

#ifndef PCOMP_SCHEMA_HPP_
#define PCOMP_SCHEMA_HPP_

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pcomp {

enum class Modality { kSpeech = 0, kFace = 1, kPose = 2 };

// Canonical order used everywhere modalities are enumerated or concatenated.
inline constexpr std::array<Modality, 3> kAllModalities = {
    Modality::kSpeech, Modality::kFace, Modality::kPose};

std::string_view modality_name(Modality m);
// Accepts "speech", "face", "pose". Throws InputError otherwise.
Modality parse_modality(std::string_view name);

namespace schema {

inline constexpr std::size_t kSpeechColumns = 88;
inline constexpr std::size_t kFaceColumns = 43;
inline constexpr std::size_t kPoseJoints = 15;
inline constexpr std::size_t kPoseColumns = 2 * kPoseJoints;

// Joint order of the pose schema; column j{k}_x / j{k}_y refers to entry k.
inline constexpr std::array<std::string_view, kPoseJoints> kPoseJointNames = {
    "nose",       "neck",     "r_shoulder", "r_elbow", "r_wrist",
    "l_shoulder", "l_elbow",  "l_wrist",    "mid_hip", "r_hip",
    "r_knee",     "r_ankle",  "l_hip",      "l_knee",  "l_ankle"};
inline constexpr std::size_t kNeck = 1;
inline constexpr std::size_t kRightShoulder = 2;
inline constexpr std::size_t kLeftShoulder = 5;

// Action units reported by the face extractor, as occurrence (_c) and
// intensity (_r) columns.
inline constexpr std::array<int, 17> kActionUnits = {
    1, 2, 4, 5, 6, 7, 9, 10, 12, 14, 15, 17, 20, 23, 25, 26, 45};

// Canonical column names, in canonical order.
const std::vector<std::string>& columns(Modality m);
// Index of `name` in the canonical schema of `m`, or -1.
int column_index(Modality m, std::string_view name);

}  // namespace schema
}  // namespace pcomp

#endif  // PCOMP_SCHEMA_HPP_
