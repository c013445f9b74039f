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

#include "pcomp/fusion.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "pcomp/error.hpp"
#include "pcomp/stats.hpp"

namespace pcomp {

std::string_view fusion_rule_name(FusionRule rule) {
  switch (rule) {
    case FusionRule::kFeature: return "FF";
    case FusionRule::kLateMedian: return "LF_median";
    case FusionRule::kLateProduct: return "LF_product";
    case FusionRule::kLateSum: return "LF_sum";
  }
  return "?";
}

FusionRule parse_fusion_rule(std::string_view name) {
  for (FusionRule r : {FusionRule::kFeature, FusionRule::kLateMedian, FusionRule::kLateProduct,
                       FusionRule::kLateSum}) {
    if (fusion_rule_name(r) == name) return r;
  }
  throw InputError("unknown fusion rule '" + std::string(name) +
                   "' (expected FF, LF_median, LF_product or LF_sum)");
}

bool is_late(FusionRule rule) { return rule != FusionRule::kFeature; }

FeatureVector feature_fuse(std::span<const FeatureVector> vectors) {
  if (vectors.empty()) throw InputError("feature_fuse needs at least one vector");
  std::vector<const FeatureVector*> ordered;
  std::set<Modality> seen;
  for (const auto& v : vectors) {
    const Modality m = parse_modality(v.modality);
    if (!seen.insert(m).second) {
      throw InputError("feature_fuse: duplicate modality " + v.modality);
    }
    if (v.video_id != vectors.front().video_id) {
      throw InputError("feature_fuse: vectors of different videos (" + v.video_id + ", " +
                       vectors.front().video_id + ")");
    }
    if (v.window != vectors.front().window) {
      throw InputError("feature_fuse: scope mismatch for video " + v.video_id);
    }
    ordered.push_back(&v);
  }
  std::sort(ordered.begin(), ordered.end(), [](const FeatureVector* a, const FeatureVector* b) {
    return parse_modality(a->modality) < parse_modality(b->modality);
  });
  FeatureVector out;
  out.video_id = vectors.front().video_id;
  out.modality = "fused";
  out.window = vectors.front().window;
  for (const FeatureVector* v : ordered) {
    out.values.insert(out.values.end(), v->values.begin(), v->values.end());
    for (const auto& n : v->names) out.names.push_back(v->modality + ":" + n);
  }
  return out;
}

FeatureVector slice_modality(const FeatureVector& fused, Modality modality) {
  const std::string prefix = std::string(modality_name(modality)) + ":";
  FeatureVector out;
  out.video_id = fused.video_id;
  out.modality = std::string(modality_name(modality));
  out.window = fused.window;
  for (std::size_t i = 0; i < fused.names.size(); ++i) {
    if (fused.names[i].rfind(prefix, 0) == 0) {
      out.names.push_back(fused.names[i].substr(prefix.size()));
      out.values.push_back(fused.values[i]);
    }
  }
  if (out.values.empty()) {
    throw InputError("fused vector has no " + std::string(modality_name(modality)) + " block");
  }
  return out;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

FusedDecision late_fuse_class(std::span<const std::vector<double>> probs, FusionRule rule) {
  if (!is_late(rule)) throw InputError("late_fuse_class: FF is not a late fusion rule");
  if (probs.size() < 2) throw InputError("late fusion needs at least 2 modality outputs");
  const std::size_t classes = probs.front().size();
  if (classes == 0) throw InputError("late fusion over an empty class set");
  for (const auto& p : probs) {
    if (p.size() != classes) {
      throw InputError("late fusion: class-set mismatch (" + std::to_string(p.size()) + " vs " +
                       std::to_string(classes) + " classes)");
    }
  }
  FusedDecision d;
  d.raw.assign(classes, 0.0);
  std::vector<double> column(probs.size());
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t m = 0; m < probs.size(); ++m) column[m] = probs[m][c];
    switch (rule) {
      case FusionRule::kLateMedian:
        d.raw[c] = stats::median(column);
        break;
      case FusionRule::kLateProduct: {
        // Multiply in sorted order so the result does not depend on the
        // order modalities are listed in.
        std::sort(column.begin(), column.end());
        double prod = 1.0;
        for (double v : column) prod *= v;
        d.raw[c] = prod;
        break;
      }
      case FusionRule::kLateSum: {
        std::sort(column.begin(), column.end());
        double sum = 0.0;
        for (double v : column) sum += v;
        d.raw[c] = sum;
        break;
      }
      case FusionRule::kFeature:
        break;
    }
  }
  double total = 0.0;
  for (double v : d.raw) total += v;
  d.normalized.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    d.normalized[c] = total > 0.0 ? d.raw[c] / total : 1.0 / static_cast<double>(classes);
  }
  d.argmax = argmax(d.raw);
  d.tie = std::count(d.raw.begin(), d.raw.end(), d.raw[d.argmax]) > 1;
  return d;
}

double late_fuse_reg(std::span<const double> values) {
  if (values.empty()) throw InputError("late_fuse_reg: no predictions to fuse");
  return stats::median(values);
}

}  // namespace pcomp
