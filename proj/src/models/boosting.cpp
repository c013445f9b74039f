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

#include "pcomp/models/boosting.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "pcomp/error.hpp"

namespace pcomp::models {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Logistic loss of raw score f for a 0/1 label, written so that flipping the
// label and negating f give bit-identical results.
double logistic_loss(double y, double f) { return softplus(y > 0.5 ? -f : f); }

}  // namespace

double BoostedTrees::raw(std::span<const double> x) const {
  double f = base;
  for (const auto& t : trees) f += t.predict(x);
  return f;
}

nlohmann::json BoostedTrees::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : trees) arr.push_back(t.to_json());
  return {{"loss", loss == BoostingLoss::kLogistic ? "logistic" : "squared"},
          {"base", base},
          {"trees", std::move(arr)},
          {"train_loss", train_loss}};
}

BoostedTrees BoostedTrees::from_json(const nlohmann::json& j) {
  BoostedTrees b;
  b.loss = j.at("loss").get<std::string>() == "logistic" ? BoostingLoss::kLogistic
                                                          : BoostingLoss::kSquared;
  b.base = j.at("base").get<double>();
  for (const auto& t : j.at("trees")) b.trees.push_back(Tree::from_json(t));
  b.train_loss = j.at("train_loss").get<std::vector<double>>();
  return b;
}

double mean_loss(BoostingLoss loss, std::span<const double> y, std::span<const double> raw) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (loss == BoostingLoss::kLogistic) {
      s += logistic_loss(y[i], raw[i]);
    } else {
      const double e = y[i] - raw[i];
      s += e * e;
    }
  }
  return s / static_cast<double>(y.size());
}

BoostedTrees fit_boosting(const BinnedMatrix& x, std::span<const double> y, BoostingLoss loss,
                          const BoostingParams& params) {
  const std::size_t n = x.rows();
  if (y.size() != n || n == 0) throw InputError("fit_boosting: empty or mismatched data");
  if (params.n_rounds < 0) throw InputError("fit_boosting: negative round count");
  if (!(params.learning_rate > 0.0)) throw InputError("fit_boosting: learning rate must be > 0");

  BoostedTrees model;
  model.loss = loss;
  if (loss == BoostingLoss::kLogistic) {
    double pos = 0.0;
    for (double v : y) pos += v;
    const double neg = static_cast<double>(n) - pos;
    if (pos <= 0.0 || neg <= 0.0) throw InputError("fit_boosting: both classes are required");
    model.base = std::log(pos) - std::log(neg);
  } else {
    double s = 0.0;
    for (double v : y) s += v;
    model.base = s / static_cast<double>(n);
  }

  std::vector<double> f(n, model.base);
  std::vector<double> residual(n);
  const std::vector<double> unit(n, 1.0);
  std::vector<int> leaf_of;
  TreeParams tp;
  tp.criterion = Criterion::kVariance;
  tp.max_depth = params.max_depth;
  tp.min_samples_leaf = params.min_samples_leaf;
  Rng rng(0);  // unused: every feature is examined at every split
  model.train_loss.push_back(mean_loss(loss, y, f));

  for (int round = 0; round < params.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      if (loss == BoostingLoss::kLogistic) {
        residual[i] = y[i] > 0.5 ? sigmoid(-f[i]) : -sigmoid(f[i]);
      } else {
        residual[i] = y[i] - f[i];
      }
    }
    Tree tree = grow_tree(x, residual, unit, tp, rng, &leaf_of);

    std::vector<std::vector<std::size_t>> members(tree.nodes.size());
    for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(leaf_of[i])].push_back(i);

    for (std::size_t leaf = 0; leaf < tree.nodes.size(); ++leaf) {
      if (!tree.nodes[leaf].is_leaf()) continue;
      const auto& m = members[leaf];
      double step = 0.0;
      if (loss == BoostingLoss::kSquared) {
        double s = 0.0;
        for (std::size_t i : m) s += residual[i];
        step = params.learning_rate * s / static_cast<double>(m.size());
      } else {
        double g = 0.0, h = 0.0;
        for (std::size_t i : m) {
          g += residual[i];
          h += sigmoid(f[i]) * sigmoid(-f[i]);
        }
        step = h > 1e-150 ? params.learning_rate * g / h : 0.0;
      }
      // Halve the step while it would raise this leaf's loss.
      const auto leaf_loss = [&](double delta) {
        double s = 0.0;
        for (std::size_t i : m) {
          if (loss == BoostingLoss::kLogistic) {
            s += logistic_loss(y[i], f[i] + delta);
          } else {
            const double e = y[i] - (f[i] + delta);
            s += e * e;
          }
        }
        return s;
      };
      const double before = leaf_loss(0.0);
      int halvings = 0;
      while (step != 0.0 && leaf_loss(step) > before) {
        step = ++halvings > 40 ? 0.0 : step / 2.0;
      }
      tree.nodes[leaf].value = step;
      for (std::size_t i : m) f[i] += step;
    }
    model.trees.push_back(std::move(tree));
    model.train_loss.push_back(mean_loss(loss, y, f));
  }
  return model;
}

}  // namespace pcomp::models
