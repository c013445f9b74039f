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

#include "pcomp/models/forest.hpp"

#include <nlohmann/json.hpp>

#include "pcomp/error.hpp"
#include "util.hpp"

namespace pcomp::models {

double Forest::predict(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& t : trees) s += t.predict(x);
  return s / static_cast<double>(trees.size());
}

std::array<double, 2> Forest::class_probs(std::span<const double> x) const {
  std::array<double, 2> p{0.0, 0.0};
  for (const auto& t : trees) {
    const auto q = t.class_probs(x);
    p[0] += q[0];
    p[1] += q[1];
  }
  p[0] /= static_cast<double>(trees.size());
  p[1] /= static_cast<double>(trees.size());
  return p;
}

nlohmann::json Forest::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : trees) arr.push_back(t.to_json());
  return {{"trees", std::move(arr)}};
}

Forest Forest::from_json(const nlohmann::json& j) {
  Forest f;
  for (const auto& t : j.at("trees")) f.trees.push_back(Tree::from_json(t));
  if (f.trees.empty()) throw InputError("corrupt forest: no trees");
  return f;
}

Forest grow_forest(const BinnedMatrix& x, std::span<const double> y, const ForestParams& params,
                   std::uint64_t seed) {
  if (params.n_trees < 1) throw InputError("a forest needs at least one tree");
  const std::size_t n = x.rows();
  Forest forest;
  forest.trees.reserve(static_cast<std::size_t>(params.n_trees));
  std::vector<double> weights(n);
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(util::mix_seed(seed, static_cast<std::uint64_t>(t)));
    if (params.bootstrap) {
      std::fill(weights.begin(), weights.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) weights[util::uniform_index(rng, n)] += 1.0;
    } else {
      std::fill(weights.begin(), weights.end(), 1.0);
    }
    forest.trees.push_back(grow_tree(x, y, weights, params.tree, rng));
  }
  return forest;
}

}  // namespace pcomp::models
