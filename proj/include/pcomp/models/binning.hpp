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

#ifndef PCOMP_MODELS_BINNING_HPP_
#define PCOMP_MODELS_BINNING_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pcomp/matrix.hpp"

namespace pcomp::models {

inline constexpr int kMaxBins = 256;

// Per-feature discretization of a training matrix into at most `max_bins`
// ordered bins. When a feature has no more distinct values than `max_bins`,
// every distinct value gets its own bin and the split candidates are exactly
// the midpoints between consecutive distinct values. Otherwise bins hold
// roughly equal sample counts.
class BinnedMatrix {
 public:
  static BinnedMatrix build(const Matrix& x, int max_bins = kMaxBins);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  // Feature-major storage: codes of feature f are contiguous.
  std::uint8_t code(std::size_t row, std::size_t feature) const {
    return codes_[feature * rows_ + row];
  }
  const std::uint8_t* feature_codes(std::size_t feature) const {
    return codes_.data() + feature * rows_;
  }
  int bins(std::size_t feature) const {
    return static_cast<int>(thresholds_[feature].size()) + 1;
  }
  // Raw value v falls into a bin <= b iff v <= threshold(f, b).
  double threshold(std::size_t feature, int bin) const {
    return thresholds_[feature][static_cast<std::size_t>(bin)];
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> codes_;
  std::vector<std::vector<double>> thresholds_;
};

}  // namespace pcomp::models

#endif  // PCOMP_MODELS_BINNING_HPP_
