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

#ifndef PCOMP_FUSION_HPP_
#define PCOMP_FUSION_HPP_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "pcomp/features.hpp"
#include "pcomp/schema.hpp"

namespace pcomp {

enum class FusionRule { kFeature, kLateMedian, kLateProduct, kLateSum };

std::string_view fusion_rule_name(FusionRule rule);  // "FF", "LF_median", ...
FusionRule parse_fusion_rule(std::string_view name);
bool is_late(FusionRule rule);

// Concatenates vectors of one (video, scope) in canonical modality order.
// Names are prefixed "<modality>:". Throws InputError on scope mismatch or a
// repeated modality.
FeatureVector feature_fuse(std::span<const FeatureVector> vectors);

// Recovers one modality's block from a fused vector.
FeatureVector slice_modality(const FeatureVector& fused, Modality modality);

struct FusedDecision {
  // Scores exactly as the combination rule produces them.
  std::vector<double> raw;
  // raw rescaled to sum to one.
  std::vector<double> normalized;
  std::size_t argmax = 0;
  // More than one class shares the maximal score; argmax is then the lowest
  // such index (class "low").
  bool tie = false;
};

// Per-class median, product or sum over modality probability vectors.
FusedDecision late_fuse_class(std::span<const std::vector<double>> probs, FusionRule rule);

// Median of per-modality regression outputs.
double late_fuse_reg(std::span<const double> values);

// Lowest index among maximal entries.
std::size_t argmax(std::span<const double> values);

}  // namespace pcomp

#endif  // PCOMP_FUSION_HPP_
