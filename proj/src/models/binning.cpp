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

#include "pcomp/models/binning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcomp/error.hpp"

namespace pcomp::models {

namespace {

// A split point strictly between a and b (a < b) that stays below b.
double midpoint(double a, double b) {
  const double m = a + (b - a) / 2.0;
  return m < b ? m : a;
}

std::vector<double> feature_thresholds(std::vector<double> values, int max_bins) {
  std::sort(values.begin(), values.end());
  std::vector<double> uniq;
  std::vector<std::size_t> counts;
  for (double v : values) {
    if (uniq.empty() || v != uniq.back()) {
      uniq.push_back(v);
      counts.push_back(1);
    } else {
      ++counts.back();
    }
  }
  std::vector<double> thresholds;
  if (uniq.size() <= static_cast<std::size_t>(max_bins)) {
    for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
      thresholds.push_back(midpoint(uniq[i], uniq[i + 1]));
    }
    return thresholds;
  }
  // Close a bin whenever the running count reaches the next equal-frequency
  // quantile.
  const double n = static_cast<double>(values.size());
  std::size_t cumulative = 0;
  int bin = 0;
  for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
    cumulative += counts[i];
    const double target = n * static_cast<double>(bin + 1) / static_cast<double>(max_bins);
    if (static_cast<double>(cumulative) >= target) {
      thresholds.push_back(midpoint(uniq[i], uniq[i + 1]));
      ++bin;
      if (bin == max_bins - 1) break;
    }
  }
  return thresholds;
}

}  // namespace

BinnedMatrix BinnedMatrix::build(const Matrix& x, int max_bins) {
  if (max_bins < 2 || max_bins > 256) {
    throw InputError("max_bins must be in [2, 256], got " + std::to_string(max_bins));
  }
  BinnedMatrix b;
  b.rows_ = x.rows();
  b.cols_ = x.cols();
  b.codes_.resize(b.rows_ * b.cols_);
  b.thresholds_.resize(b.cols_);
  std::vector<double> col(b.rows_);
  for (std::size_t f = 0; f < b.cols_; ++f) {
    for (std::size_t r = 0; r < b.rows_; ++r) col[r] = x(r, f);
    b.thresholds_[f] = feature_thresholds(col, max_bins);
    const auto& th = b.thresholds_[f];
    std::uint8_t* codes = b.codes_.data() + f * b.rows_;
    for (std::size_t r = 0; r < b.rows_; ++r) {
      // Number of thresholds strictly below the value.
      codes[r] = static_cast<std::uint8_t>(std::lower_bound(th.begin(), th.end(), col[r]) -
                                           th.begin());
    }
  }
  return b;
}

}  // namespace pcomp::models
