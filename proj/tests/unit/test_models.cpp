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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "common/oracles.hpp"
#include "pcomp/error.hpp"
#include "pcomp/models.hpp"

namespace pcomp {
namespace {

Matrix rows(const std::vector<std::vector<double>>& r) {
  Matrix m;
  for (const auto& v : r) m.append_row(v);
  return m;
}

ModelSpec spec(Family f, Task t, std::uint64_t seed = 1) {
  ModelSpec s;
  s.family = f;
  s.task = t;
  s.seed = seed;
  s.hp.n_estimators = 50;
  return s;
}

std::vector<int> labels_of(const std::vector<ClassProbs>& p) {
  std::vector<int> out;
  for (const auto& q : p) out.push_back(q[1] > q[0] ? 1 : 0);
  return out;
}

double accuracy(const TrainedModel& m, const Matrix& x, std::span<const double> y) {
  const auto l = labels_of(m.predict_proba(x));
  int ok = 0;
  for (std::size_t i = 0; i < l.size(); ++i) ok += l[i] == static_cast<int>(y[i]);
  return static_cast<double>(ok) / static_cast<double>(l.size());
}

struct Dataset {
  Matrix x;
  std::vector<double> y;
};

Dataset noisy_classes(std::uint64_t seed, std::size_t n = 60, std::size_t d = 4) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Dataset ds;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r(d);
    for (double& v : r) v = g(rng);
    ds.y.push_back(r[0] + 0.5 * r[1] + 0.8 * g(rng) > 0 ? 1.0 : 0.0);
    ds.x.append_row(r);
  }
  return ds;
}

// Two well separated clusters in the plane with margin at least 1.
Dataset separable_2d() {
  Dataset ds;
  for (int i = 0; i < 10; ++i) {
    const double t = 0.3 * i;
    ds.x.append_row(std::vector<double>{-1.5 - std::cos(t), std::sin(t)});
    ds.y.push_back(0);
    ds.x.append_row(std::vector<double>{1.5 + std::sin(t), std::cos(t)});
    ds.y.push_back(1);
  }
  return ds;
}

TEST(Models, TreeFindsExhaustiveBestFirstSplit) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix x;
    std::vector<double> y;
    for (int i = 0; i < 20; ++i) {
      const double a = u(rng), b = u(rng);
      x.append_row(std::vector<double>{a, b});
      y.push_back(a + 0.7 * b + 0.6 * u(rng) > 0 ? 1.0 : 0.0);
    }
    if (std::count(y.begin(), y.end(), 1.0) % 20 == 0) continue;
    const oracle::BestSplit best = oracle::exhaustive_first_split(x, y);
    models::TreeParams tp;
    tp.max_depth = 1;
    models::Rng r(1);
    const std::vector<double> w(20, 1.0);
    const models::Tree tree = models::grow_tree(models::BinnedMatrix::build(x), y, w, tp, r);
    const auto& root = tree.nodes[0];
    const bool hit = std::any_of(best.argmins.begin(), best.argmins.end(), [&](const auto& s) {
      return s.first == root.feature && std::abs(s.second - root.threshold) < 1e-12;
    });
    EXPECT_TRUE(hit) << "trial " << trial;
  }
}

TEST(Models, XorNeedsDepthTwo) {
  const Matrix x = rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const std::vector<double> y{0, 1, 1, 0};
  ModelSpec deep = spec(Family::kGB, Task::kClassification);
  deep.hp.n_estimators = 200;
  deep.hp.gb_max_depth = 2;
  EXPECT_EQ(accuracy(train(deep, x, y), x, y), 1.0);
  ModelSpec stump = deep;
  stump.hp.gb_max_depth = 1;
  EXPECT_LT(accuracy(train(stump, x, y), x, y), 1.0);
}

TEST(Models, DecisionTreeFitsIdentity) {
  Matrix x;
  std::vector<double> y;
  for (int i = 0; i < 10; ++i) {
    x.append_row(std::vector<double>{static_cast<double>(i)});
    y.push_back(i);
  }
  ModelSpec s = spec(Family::kDT, Task::kRegression);
  s.hp.dt_max_depth = 4;
  const auto pred = train(s, x, y).predict_value(x);
  double mse = 0;
  for (int i = 0; i < 10; ++i) mse += (pred[i] - y[i]) * (pred[i] - y[i]);
  EXPECT_LT(mse / 10, 0.05);
}

TEST(Models, DecisionStumpReturnsLeafFrequencies) {
  const Matrix x = rows({{1}, {2}, {3}, {4}, {5}, {6}});
  const std::vector<double> y{0, 0, 1, 1, 1, 0};
  ModelSpec s = spec(Family::kDT, Task::kClassification);
  s.hp.dt_max_depth = 1;
  const TrainedModel m = train(s, x, y);
  const auto p = m.predict_proba(rows({{1}, {5}}));
  EXPECT_DOUBLE_EQ(p[0][1], 0.0);
  EXPECT_DOUBLE_EQ(p[1][0], 0.25);
  EXPECT_DOUBLE_EQ(p[1][1], 0.75);
}

TEST(Models, ForestWithoutBootstrapIsCertainOnPureData) {
  const Dataset ds = separable_2d();
  ModelSpec s = spec(Family::kRF, Task::kClassification);
  s.hp.rf_bootstrap = false;
  const auto p = train(s, ds.x, ds.y).predict_proba(ds.x);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i][static_cast<int>(ds.y[i])], 1.0);
}

TEST(Models, DeepPointsAreConfident) {
  // Two tight blobs around (-3,-3) and (3,3); the query points are the blob
  // centres, which are also training points.
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g(0.0, 0.5);
  Dataset ds;
  for (int i = 0; i < 50; ++i) {
    const double c = i == 0 ? 0.0 : 1.0;
    ds.x.append_row(std::vector<double>{-3 + c * g(rng), -3 + c * g(rng)});
    ds.y.push_back(0);
    ds.x.append_row(std::vector<double>{3 + c * g(rng), 3 + c * g(rng)});
    ds.y.push_back(1);
  }
  for (Family f : kAllFamilies) {
    const auto p = train(spec(f, Task::kClassification), ds.x, ds.y).predict_proba(rows({{-3, -3}, {3, 3}}));
    EXPECT_GT(p[0][0], 0.9) << family_name(f);
    EXPECT_GT(p[1][1], 0.9) << family_name(f);
  }
}

TEST(Models, ConstantTargetIsReproduced) {
  const Dataset ds = noisy_classes(2);
  const std::vector<double> y(ds.y.size(), 2.5);
  for (Family f : {Family::kGB, Family::kDT, Family::kRF}) {
    for (double v : train(spec(f, Task::kRegression), ds.x, y).predict_value(ds.x)) {
      EXPECT_NEAR(v, 2.5, 1e-6) << family_name(f);
    }
  }
}

TEST(Models, SvrFitsALine) {
  Matrix x, xt;
  std::vector<double> y;
  for (int i = 0; i < 50; ++i) {
    const double t = i / 49.0;
    x.append_row(std::vector<double>{t});
    y.push_back(2 * t + 1);
  }
  for (int i = 0; i < 49; ++i) xt.append_row(std::vector<double>{(i + 0.5) / 49.0});
  ModelSpec s = spec(Family::kSVM, Task::kRegression);
  s.hp.svr_epsilon = 0.01;
  const auto pred = train(s, x, y).predict_value(xt);
  double mse = 0;
  for (int i = 0; i < 49; ++i) {
    const double e = pred[i] - (2 * xt(i, 0) + 1);
    mse += e * e;
  }
  EXPECT_LT(mse / 49, 0.01);
}

TEST(Models, ZeroRoundBoostingPredictsTheMean) {
  const Dataset ds = noisy_classes(4);
  std::vector<double> y;
  for (std::size_t i = 0; i < ds.y.size(); ++i) y.push_back(1 + 3 * ds.y[i] + 0.01 * i);
  ModelSpec s = spec(Family::kGB, Task::kRegression);
  s.hp.n_estimators = 0;
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  for (double v : train(s, ds.x, y).predict_value(ds.x)) EXPECT_NEAR(v, mean, 1e-12);
}

TEST(Models, BoostingLossNeverIncreases) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset ds = noisy_classes(seed);
    for (Task t : {Task::kClassification, Task::kRegression}) {
      const auto loss = train(spec(Family::kGB, t, seed), ds.x, ds.y).diagnostics().train_loss;
      ASSERT_EQ(loss.size(), 51u);
      for (std::size_t i = 1; i < loss.size(); ++i) EXPECT_LE(loss[i], loss[i - 1] + 1e-12);
    }
  }
}

TEST(Models, ProbabilitiesSumToOne) {
  const Dataset ds = noisy_classes(6);
  for (Family f : kAllFamilies) {
    for (const auto& p : train(spec(f, Task::kClassification), ds.x, ds.y).predict_proba(ds.x)) {
      EXPECT_NEAR(p[0] + p[1], 1.0, 1e-9) << family_name(f);
      EXPECT_GE(p[0], 0.0);
      EXPECT_GE(p[1], 0.0);
    }
  }
}

TEST(Models, RelabellingSwapsProbabilityColumns) {
  const Dataset ds = noisy_classes(8);
  std::vector<double> flipped;
  for (double v : ds.y) flipped.push_back(1 - v);
  for (Family f : kAllFamilies) {
    const auto a = train(spec(f, Task::kClassification, 3), ds.x, ds.y).predict_proba(ds.x);
    const auto b = train(spec(f, Task::kClassification, 3), ds.x, flipped).predict_proba(ds.x);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i][0], b[i][1]) << family_name(f);
      EXPECT_EQ(a[i][1], b[i][0]) << family_name(f);
    }
  }
}

TEST(Models, TrainingIsDeterministic) {
  const Dataset ds = noisy_classes(9);
  for (Family f : kAllFamilies) {
    for (Task t : {Task::kClassification, Task::kRegression}) {
      const TrainedModel a = train(spec(f, t, 77), ds.x, ds.y);
      const TrainedModel b = train(spec(f, t, 77), ds.x, ds.y);
      EXPECT_EQ(a.serialize(), b.serialize()) << family_name(f);
    }
  }
}

TEST(Models, SerializationRoundTrip) {
  const Dataset ds = noisy_classes(10);
  for (Family f : kAllFamilies) {
    for (Task t : {Task::kClassification, Task::kRegression}) {
      const TrainedModel m = train(spec(f, t, 5), ds.x, ds.y);
      const TrainedModel back = TrainedModel::deserialize(m.serialize());
      EXPECT_EQ(back.serialize(), m.serialize());
      if (t == Task::kClassification) {
        EXPECT_EQ(back.predict_proba(ds.x), m.predict_proba(ds.x));
      } else {
        EXPECT_EQ(back.predict_value(ds.x), m.predict_value(ds.x));
      }
    }
  }
  EXPECT_THROW(TrainedModel::deserialize("{\"format\":\"other\"}"), InputError);
  EXPECT_THROW(TrainedModel::deserialize("not json"), InputError);
}

TEST(Models, SvmSeparatesAndConverges) {
  const Dataset ds = separable_2d();
  const TrainedModel m = train(spec(Family::kSVM, Task::kClassification), ds.x, ds.y);
  EXPECT_EQ(accuracy(m, ds.x, ds.y), 1.0);
  const ModelDiagnostics d = m.diagnostics();
  EXPECT_TRUE(d.solver_converged);
  EXPECT_LT(d.kkt_gap, 1e-3);
}

TEST(Models, SvmDualMatchesProjectedGradientOracle) {
  const Dataset ds = separable_2d();
  const double gamma = 0.5, c = 10.0;
  const Matrix k = models::rbf_gram(ds.x, gamma);
  models::DualProblem prob;
  prob.gram = &k;
  prob.c = c;
  for (std::size_t i = 0; i < ds.y.size(); ++i) {
    prob.base.push_back(i);
    prob.y.push_back(ds.y[i] > 0.5 ? 1.0 : -1.0);
    prob.p.push_back(-1.0);
  }
  const models::DualSolution sol = models::solve_dual(prob, 1e-8, 1'000'000);
  EXPECT_TRUE(sol.converged);
  Matrix q(ds.y.size(), ds.y.size());
  for (std::size_t i = 0; i < ds.y.size(); ++i) {
    for (std::size_t j = 0; j < ds.y.size(); ++j) q(i, j) = prob.y[i] * prob.y[j] * k(i, j);
  }
  EXPECT_NEAR(sol.objective, oracle::projected_gradient_dual(q, prob.y, c), 1e-4);
  EXPECT_NEAR(sol.objective, models::dual_objective(prob, sol.alpha), 1e-9);
  double balance = 0;
  for (std::size_t i = 0; i < sol.alpha.size(); ++i) {
    EXPECT_GE(sol.alpha[i], 0.0);
    EXPECT_LE(sol.alpha[i], c);
    balance += prob.y[i] * sol.alpha[i];
  }
  EXPECT_NEAR(balance, 0.0, 1e-9);
}

TEST(Models, ForestTrainingAccuracyAtLeastTree) {
  int holds = 0;
  for (std::uint64_t seed = 100; seed < 150; ++seed) {
    const Dataset ds = noisy_classes(seed, 40, 5);
    const double rf = accuracy(train(spec(Family::kRF, Task::kClassification, seed), ds.x, ds.y), ds.x, ds.y);
    const double dt = accuracy(train(spec(Family::kDT, Task::kClassification, seed), ds.x, ds.y), ds.x, ds.y);
    holds += rf >= dt;
  }
  EXPECT_GE(holds, 45);
}

TEST(Models, TrainRejectsBadTargets) {
  const Dataset ds = noisy_classes(12, 10);
  const ModelSpec s = spec(Family::kDT, Task::kClassification);
  EXPECT_THROW(train(s, ds.x, std::vector<double>(10, 1.0)), InputError);
  EXPECT_THROW(train(s, ds.x, std::vector<double>(9, 1.0)), InputError);
  std::vector<double> bad = ds.y;
  bad[0] = 2;
  EXPECT_THROW(train(s, ds.x, bad), InputError);
  const TrainedModel m = train(s, ds.x, ds.y);
  EXPECT_THROW(m.predict_value(ds.x), InputError);
  EXPECT_THROW(m.predict_proba(rows({{1, 2}})), InputError);
}

TEST(Models, SpecJsonRoundTrip) {
  for (Family f : kAllFamilies) {
    ModelSpec s = spec(f, Task::kRegression, 99);
    s.hp.svm_c = 3.5;
    s.hp.learning_rate = 0.05;
    const ModelSpec back = spec_from_json(spec_to_json(s));
    EXPECT_EQ(back.family, f);
    EXPECT_EQ(back.seed, 99u);
    EXPECT_EQ(spec_to_json(back), spec_to_json(s));
  }
}

}  // namespace
}  // namespace pcomp
