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

#include "pcomp/matrix.hpp"

#include <string>

#include "pcomp/error.hpp"

namespace pcomp {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw InputError("matrix data size " + std::to_string(data_.size()) + " != " +
                     std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m;
  for (const auto& r : rows) m.append_row(r);
  return m;
}

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && data_.empty()) {
    cols_ = values.size();
  } else if (values.size() != cols_) {
    throw InputError("row of length " + std::to_string(values.size()) +
                     " appended to matrix with " + std::to_string(cols_) + " columns");
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

}  // namespace pcomp
