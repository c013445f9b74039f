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

#ifndef PCOMP_MODELS_BOOSTING_HPP_
#define PCOMP_MODELS_BOOSTING_HPP_

#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pcomp/models/tree.hpp"

namespace pcomp::models {

enum class BoostingLoss { kSquared, kLogistic };

struct BoostingParams {
  int n_rounds = 200;
  double learning_rate = 0.1;
  int max_depth = 3;
  int min_samples_leaf = 1;
};

// Additive model F(x) = base + sum of tree outputs. Under the logistic loss F
// is the log-odds of class 1. Leaf values already include the shrinkage.
class BoostedTrees {
 public:
  BoostingLoss loss = BoostingLoss::kSquared;
  double base = 0.0;
  std::vector<Tree> trees;
  // Mean training loss before the first round and after every round.
  std::vector<double> train_loss;

  double raw(std::span<const double> x) const;

  nlohmann::json to_json() const;
  static BoostedTrees from_json(const nlohmann::json& j);
};

// Squared loss: leaves hold the shrunk mean residual. Logistic loss: trees are
// fit to the negative gradient y - p and leaves take a shrunk Newton step,
// halved while it would raise that leaf's loss.
BoostedTrees fit_boosting(const BinnedMatrix& x, std::span<const double> y, BoostingLoss loss,
                          const BoostingParams& params);

double mean_loss(BoostingLoss loss, std::span<const double> y, std::span<const double> raw);

}  // namespace pcomp::models

#endif  // PCOMP_MODELS_BOOSTING_HPP_
