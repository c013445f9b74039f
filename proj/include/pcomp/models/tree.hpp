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

#ifndef PCOMP_MODELS_TREE_HPP_
#define PCOMP_MODELS_TREE_HPP_

#include <array>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pcomp/models/binning.hpp"

namespace pcomp::models {

using Rng = std::mt19937_64;

enum class Criterion { kGini, kVariance };

struct TreeNode {
  // -1 marks a leaf.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  // Leaf output: P(class 1) under Gini, weighted mean target under variance.
  double value = 0.0;
  // Total sample weight and weighted target sum of the node.
  double weight = 0.0;
  double sum = 0.0;

  bool is_leaf() const { return feature < 0; }
};

class Tree {
 public:
  std::vector<TreeNode> nodes;

  int leaf_index(std::span<const double> x) const;
  double predict(std::span<const double> x) const {
    return nodes[static_cast<std::size_t>(leaf_index(x))].value;
  }
  // {P(class 0), P(class 1)} from the leaf's weighted class counts.
  std::array<double, 2> class_probs(std::span<const double> x) const;
  int depth() const;
  std::size_t leaf_count() const;

  nlohmann::json to_json() const;
  static Tree from_json(const nlohmann::json& j);
};

struct TreeParams {
  Criterion criterion = Criterion::kGini;
  // 0 means unlimited.
  int max_depth = 0;
  int min_samples_leaf = 1;
  // Features examined per split; 0 means all.
  int max_features = 0;
};

// Grows a CART tree greedily. `y` holds 0/1 labels under Gini. Samples with
// zero weight are ignored. An impure node is split on the best available
// candidate even when the impurity decrease is zero. When `leaf_of_sample` is
// given it receives, for every sample with positive weight, the index of the
// leaf it ends in (-1 for ignored samples).
Tree grow_tree(const BinnedMatrix& x, std::span<const double> y,
               std::span<const double> weights, const TreeParams& params, Rng& rng,
               std::vector<int>* leaf_of_sample = nullptr);

}  // namespace pcomp::models

#endif  // PCOMP_MODELS_TREE_HPP_
