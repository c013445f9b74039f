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

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pcomp/error.hpp"
#include "pcomp/models.hpp"
#include "util.hpp"

namespace pcomp {

using nlohmann::json;

std::string_view family_name(Family f) {
  switch (f) {
    case Family::kGB: return "GB";
    case Family::kDT: return "DT";
    case Family::kRF: return "RF";
    case Family::kSVM: return "SVM";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  throw InputError("unknown model family '" + std::string(name) + "' (expected GB, DT, RF or SVM)");
}

std::string_view task_name(Task t) {
  return t == Task::kClassification ? "classification" : "regression";
}

Task parse_task(std::string_view name) {
  if (name == "classification") return Task::kClassification;
  if (name == "regression") return Task::kRegression;
  throw InputError("unknown task '" + std::string(name) + "'");
}

json spec_to_json(const ModelSpec& spec) {
  const auto& hp = spec.hp;
  json j = {{"family", family_name(spec.family)},
            {"task", task_name(spec.task)},
            {"seed", spec.seed}};
  json p;
  switch (spec.family) {
    case Family::kGB:
      p = {{"n_estimators", hp.n_estimators}, {"learning_rate", hp.learning_rate},
           {"max_depth", hp.gb_max_depth}, {"min_samples_leaf", hp.min_samples_leaf},
           {"max_bins", hp.max_bins}};
      break;
    case Family::kDT:
      p = {{"max_depth", hp.dt_max_depth}, {"min_samples_leaf", hp.min_samples_leaf},
           {"max_bins", hp.max_bins}};
      break;
    case Family::kRF:
      p = {{"n_estimators", hp.n_estimators}, {"max_depth", hp.rf_max_depth},
           {"min_samples_leaf", hp.min_samples_leaf}, {"bootstrap", hp.rf_bootstrap},
           {"max_bins", hp.max_bins}};
      break;
    case Family::kSVM:
      p = {{"c", hp.svm_c}, {"gamma", hp.svm_gamma}, {"epsilon", hp.svr_epsilon},
           {"tol", hp.svm_tol}, {"max_iterations", hp.svm_max_iterations}};
      break;
  }
  j["params"] = std::move(p);
  return j;
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec s;
  s.family = parse_family(j.at("family").get<std::string>());
  s.task = parse_task(j.at("task").get<std::string>());
  s.seed = j.at("seed").get<std::uint64_t>();
  const json& p = j.at("params");
  auto& hp = s.hp;
  switch (s.family) {
    case Family::kGB:
      hp.n_estimators = p.at("n_estimators");
      hp.learning_rate = p.at("learning_rate");
      hp.gb_max_depth = p.at("max_depth");
      hp.min_samples_leaf = p.at("min_samples_leaf");
      hp.max_bins = p.at("max_bins");
      break;
    case Family::kDT:
      hp.dt_max_depth = p.at("max_depth");
      hp.min_samples_leaf = p.at("min_samples_leaf");
      hp.max_bins = p.at("max_bins");
      break;
    case Family::kRF:
      hp.n_estimators = p.at("n_estimators");
      hp.rf_max_depth = p.at("max_depth");
      hp.min_samples_leaf = p.at("min_samples_leaf");
      hp.rf_bootstrap = p.at("bootstrap");
      hp.max_bins = p.at("max_bins");
      break;
    case Family::kSVM:
      hp.svm_c = p.at("c");
      hp.svm_gamma = p.at("gamma");
      hp.svr_epsilon = p.at("epsilon");
      hp.svm_tol = p.at("tol");
      hp.svm_max_iterations = p.at("max_iterations");
      break;
  }
  return s;
}

TrainedModel::TrainedModel(ModelSpec spec, Standardizer standardizer, Estimator estimator)
    : spec_(std::move(spec)), standardizer_(std::move(standardizer)),
      estimator_(std::move(estimator)) {}

Matrix TrainedModel::prepare(const Matrix& x) const {
  if (x.cols() != input_dims()) {
    throw InputError("model expects " + std::to_string(input_dims()) + " features, got " +
                     std::to_string(x.cols()));
  }
  return standardizer_.transform(x);
}

std::vector<ClassProbs> TrainedModel::predict_proba(const Matrix& x) const {
  if (spec_.task != Task::kClassification) {
    throw InputError("predict_proba called on a regression model");
  }
  const Matrix z = prepare(x);
  std::vector<ClassProbs> out(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const auto row = z.row(i);
    out[i] = std::visit(
        [&](const auto& est) -> ClassProbs {
          using T = std::decay_t<decltype(est)>;
          if constexpr (std::is_same_v<T, models::BoostedTrees>) {
            const double f = est.raw(row);
            const double p1 = f >= 0.0 ? 1.0 / (1.0 + std::exp(-f))
                                       : std::exp(f) / (1.0 + std::exp(f));
            const double p0 = -f >= 0.0 ? 1.0 / (1.0 + std::exp(f))
                                        : std::exp(-f) / (1.0 + std::exp(-f));
            return {p0, p1};
          } else if constexpr (std::is_same_v<T, models::KernelMachine>) {
            return est.platt.probabilities(est.decision(row));
          } else {
            return est.class_probs(row);
          }
        },
        estimator_);
  }
  return out;
}

std::vector<double> TrainedModel::predict_value(const Matrix& x) const {
  if (spec_.task != Task::kRegression) {
    throw InputError("predict_value called on a classification model");
  }
  const Matrix z = prepare(x);
  std::vector<double> out(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const auto row = z.row(i);
    out[i] = std::visit(
        [&](const auto& est) -> double {
          using T = std::decay_t<decltype(est)>;
          if constexpr (std::is_same_v<T, models::BoostedTrees>) {
            return est.raw(row);
          } else if constexpr (std::is_same_v<T, models::KernelMachine>) {
            return est.decision(row);
          } else {
            return est.predict(row);
          }
        },
        estimator_);
  }
  return out;
}

ModelDiagnostics TrainedModel::diagnostics() const {
  ModelDiagnostics d;
  if (const auto* gb = std::get_if<models::BoostedTrees>(&estimator_)) {
    d.train_loss = gb->train_loss;
  } else if (const auto* km = std::get_if<models::KernelMachine>(&estimator_)) {
    d.dual_objective = km->diagnostics.objective;
    d.kkt_gap = km->diagnostics.kkt_gap;
    d.solver_iterations = km->diagnostics.iterations;
    d.solver_converged = km->diagnostics.converged;
    d.gamma = km->gamma;
  } else if (const auto* tree = std::get_if<models::Tree>(&estimator_)) {
    if (!tree->nodes.empty() && !tree->nodes[0].is_leaf()) {
      d.root_feature = tree->nodes[0].feature;
      d.root_threshold = tree->nodes[0].threshold;
    }
  }
  return d;
}

std::string TrainedModel::serialize() const {
  json est = std::visit([](const auto& e) { return e.to_json(); }, estimator_);
  json j = {{"format", "pcomp.model"},
            {"version", 1},
            {"spec", spec_to_json(spec_)},
            {"standardizer", {{"means", standardizer_.means()}, {"stds", standardizer_.stds()}}},
            {"estimator", std::move(est)}};
  return j.dump();
}

TrainedModel TrainedModel::deserialize(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "pcomp.model") throw InputError("not a pcomp model file");
    if (j.at("version") != 1) throw InputError("unsupported model format version");
    ModelSpec spec = spec_from_json(j.at("spec"));
    Standardizer st(j.at("standardizer").at("means").get<std::vector<double>>(),
                    j.at("standardizer").at("stds").get<std::vector<double>>());
    const json& e = j.at("estimator");
    Estimator est;
    switch (spec.family) {
      case Family::kGB: est = models::BoostedTrees::from_json(e); break;
      case Family::kDT: est = models::Tree::from_json(e); break;
      case Family::kRF: est = models::Forest::from_json(e); break;
      case Family::kSVM: est = models::KernelMachine::from_json(e); break;
    }
    return TrainedModel(std::move(spec), std::move(st), std::move(est));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
}

void TrainedModel::save(const std::filesystem::path& path) const {
  util::write_text_file(path, serialize());
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  return deserialize(util::read_text_file(path));
}

TrainedModel train(const ModelSpec& spec, const Matrix& x, std::span<const double> y) {
  if (x.rows() == 0) throw InputError("train: no training samples");
  if (y.size() != x.rows()) throw InputError("train: target count does not match samples");
  for (double v : y) {
    if (!std::isfinite(v)) throw InputError("train: non-finite target");
  }
  const bool cls = spec.task == Task::kClassification;
  if (cls) {
    bool lo = false, hi = false;
    for (double v : y) {
      if (v == 0.0) lo = true;
      else if (v == 1.0) hi = true;
      else throw InputError("train: classification targets must be 0 or 1");
    }
    if (!lo || !hi) throw InputError("train: classification needs both classes in the training set");
  }

  Standardizer st = Standardizer::fit(x);
  const Matrix z = st.transform(x);
  const auto& hp = spec.hp;
  TrainedModel::Estimator est;

  switch (spec.family) {
    case Family::kGB: {
      models::BoostingParams p;
      p.n_rounds = hp.n_estimators;
      p.learning_rate = hp.learning_rate;
      p.max_depth = hp.gb_max_depth;
      p.min_samples_leaf = hp.min_samples_leaf;
      est = models::fit_boosting(models::BinnedMatrix::build(z, hp.max_bins), y,
                                 cls ? models::BoostingLoss::kLogistic : models::BoostingLoss::kSquared,
                                 p);
      break;
    }
    case Family::kDT: {
      models::TreeParams p;
      p.criterion = cls ? models::Criterion::kGini : models::Criterion::kVariance;
      p.max_depth = hp.dt_max_depth;
      p.min_samples_leaf = hp.min_samples_leaf;
      const std::vector<double> w(z.rows(), 1.0);
      models::Rng rng(spec.seed);
      est = models::grow_tree(models::BinnedMatrix::build(z, hp.max_bins), y, w, p, rng);
      break;
    }
    case Family::kRF: {
      models::ForestParams p;
      p.n_trees = hp.n_estimators;
      p.bootstrap = hp.rf_bootstrap;
      p.tree.criterion = cls ? models::Criterion::kGini : models::Criterion::kVariance;
      p.tree.max_depth = hp.rf_max_depth;
      p.tree.min_samples_leaf = hp.min_samples_leaf;
      // Candidate features per split: sqrt(d) for classification, d/3 for regression.
      const double d = static_cast<double>(z.cols());
      p.tree.max_features = std::max(1, static_cast<int>(cls ? std::sqrt(d) : d / 3.0));
      est = models::grow_forest(models::BinnedMatrix::build(z, hp.max_bins), y, p, spec.seed);
      break;
    }
    case Family::kSVM: {
      models::SvmParams p;
      p.c = hp.svm_c;
      p.gamma = hp.svm_gamma;
      p.epsilon = hp.svr_epsilon;
      p.tol = hp.svm_tol;
      p.max_iterations = hp.svm_max_iterations;
      est = cls ? models::fit_svc(z, y, p) : models::fit_svr(z, y, p);
      break;
    }
  }
  return TrainedModel(spec, std::move(st), std::move(est));
}

TrainedModel train(const ModelSpec& spec, std::span<const FeatureVector> x,
                   std::span<const double> y) {
  return train(spec, to_matrix(x), y);
}

std::vector<ClassProbs> predict_proba(const TrainedModel& m, std::span<const FeatureVector> x) {
  return m.predict_proba(to_matrix(x));
}

std::vector<double> predict_value(const TrainedModel& m, std::span<const FeatureVector> x) {
  return m.predict_value(to_matrix(x));
}

}  // namespace pcomp
