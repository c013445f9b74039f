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

#ifndef PCOMP_MODELS_HPP_
#define PCOMP_MODELS_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pcomp/features.hpp"
#include "pcomp/matrix.hpp"
#include "pcomp/models/boosting.hpp"
#include "pcomp/models/forest.hpp"
#include "pcomp/models/svm.hpp"
#include "pcomp/models/tree.hpp"

namespace pcomp {

enum class Family { kGB, kDT, kRF, kSVM };
enum class Task { kClassification, kRegression };

std::string_view family_name(Family f);  // "GB", "DT", "RF", "SVM"
Family parse_family(std::string_view name);
std::string_view task_name(Task t);  // "classification", "regression"
Task parse_task(std::string_view name);

inline constexpr std::array<Family, 4> kAllFamilies = {Family::kGB, Family::kDT, Family::kRF,
                                                       Family::kSVM};

struct Hyperparameters {
  // GB and RF ensemble size.
  int n_estimators = 200;
  double learning_rate = 0.1;
  int gb_max_depth = 3;
  // 0 = unlimited.
  int dt_max_depth = 0;
  int rf_max_depth = 0;
  int min_samples_leaf = 1;
  bool rf_bootstrap = true;
  int max_bins = models::kMaxBins;
  double svm_c = 10.0;
  // <= 0 selects 1 / (d * var(X)) on standardized training data.
  double svm_gamma = 0.0;
  double svr_epsilon = 0.1;
  double svm_tol = 1e-3;
  long svm_max_iterations = 10'000'000;

  bool operator==(const Hyperparameters&) const = default;
};

struct ModelSpec {
  Family family = Family::kGB;
  Task task = Task::kClassification;
  Hyperparameters hp;
  std::uint64_t seed = 0;
};

// Only the hyperparameters the family uses.
nlohmann::json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::json& j);

using ClassProbs = std::array<double, 2>;

struct ModelDiagnostics {
  std::vector<double> train_loss;  // GB
  double dual_objective = 0.0;     // SVM
  double kkt_gap = 0.0;
  long solver_iterations = 0;
  bool solver_converged = true;
  double gamma = 0.0;
  int root_feature = -1;  // DT
  double root_threshold = 0.0;
};

// A fitted estimator together with the standardizer fitted on its training
// data. Immutable; concurrent predictions are safe.
class TrainedModel {
 public:
  using Estimator =
      std::variant<models::Tree, models::Forest, models::BoostedTrees, models::KernelMachine>;

  TrainedModel(ModelSpec spec, Standardizer standardizer, Estimator estimator);

  const ModelSpec& spec() const { return spec_; }
  const Standardizer& standardizer() const { return standardizer_; }
  const Estimator& estimator() const { return estimator_; }
  std::size_t input_dims() const { return standardizer_.dims(); }

  // Throws InputError for regressors or on a dimension mismatch.
  std::vector<ClassProbs> predict_proba(const Matrix& x) const;
  // Raw regression outputs (not clamped). Throws InputError for classifiers.
  std::vector<double> predict_value(const Matrix& x) const;

  ModelDiagnostics diagnostics() const;

  std::string serialize() const;
  static TrainedModel deserialize(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);

 private:
  Matrix prepare(const Matrix& x) const;

  ModelSpec spec_;
  Standardizer standardizer_;
  Estimator estimator_;
};

// Fits the standardizer on x, then the estimator on the standardized data.
// Classification targets must be 0 (low) / 1 (high) with both classes present.
TrainedModel train(const ModelSpec& spec, const Matrix& x, std::span<const double> y);
TrainedModel train(const ModelSpec& spec, std::span<const FeatureVector> x,
                   std::span<const double> y);

std::vector<ClassProbs> predict_proba(const TrainedModel& m, std::span<const FeatureVector> x);
std::vector<double> predict_value(const TrainedModel& m, std::span<const FeatureVector> x);

}  // namespace pcomp

#endif  // PCOMP_MODELS_HPP_
