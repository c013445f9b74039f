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

#ifndef PCOMP_MODELS_FOREST_HPP_
#define PCOMP_MODELS_FOREST_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pcomp/models/tree.hpp"

namespace pcomp::models {

struct ForestParams {
  int n_trees = 200;
  TreeParams tree;
  bool bootstrap = true;
};

// Bagged CART ensemble; the output is the mean of the tree outputs, i.e. the
// mean leaf class frequency under Gini.
class Forest {
 public:
  std::vector<Tree> trees;

  double predict(std::span<const double> x) const;
  std::array<double, 2> class_probs(std::span<const double> x) const;

  nlohmann::json to_json() const;
  static Forest from_json(const nlohmann::json& j);
};

Forest grow_forest(const BinnedMatrix& x, std::span<const double> y,
                   const ForestParams& params, std::uint64_t seed);

}  // namespace pcomp::models

#endif  // PCOMP_MODELS_FOREST_HPP_
