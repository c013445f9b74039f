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

#include "pcomp/config.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "pcomp/error.hpp"
#include "util.hpp"

namespace pcomp {

using nlohmann::json;

std::string_view scope_name(FeatureScope s) {
  return s == FeatureScope::kGlobal ? "global" : "local";
}

FeatureScope parse_scope(std::string_view name) {
  if (name == "global") return FeatureScope::kGlobal;
  if (name == "local") return FeatureScope::kLocal;
  throw InputError("unknown feature scope '" + std::string(name) + "' (expected global or local)");
}

namespace {

template <class T, class Fn>
json names(const std::vector<T>& values, Fn name) {
  json arr = json::array();
  for (const auto& v : values) arr.push_back(std::string(name(v)));
  return arr;
}

template <class T, class Fn>
std::vector<T> parse_list(const json& j, std::string_view key, Fn parse) {
  if (!j.is_array()) throw InputError("config field '" + std::string(key) + "' must be a list");
  std::vector<T> out;
  for (const auto& e : j) {
    if (!e.is_string()) {
      throw InputError("config field '" + std::string(key) + "' must list strings");
    }
    out.push_back(parse(e.get<std::string>()));
  }
  return out;
}

json hp_to_json(const Hyperparameters& hp) {
  return {{"n_estimators", hp.n_estimators},
          {"learning_rate", hp.learning_rate},
          {"gb_max_depth", hp.gb_max_depth},
          {"dt_max_depth", hp.dt_max_depth},
          {"rf_max_depth", hp.rf_max_depth},
          {"min_samples_leaf", hp.min_samples_leaf},
          {"rf_bootstrap", hp.rf_bootstrap},
          {"max_bins", hp.max_bins},
          {"svm_c", hp.svm_c},
          {"svm_gamma", hp.svm_gamma},
          {"svr_epsilon", hp.svr_epsilon},
          {"svm_tol", hp.svm_tol},
          {"svm_max_iterations", hp.svm_max_iterations}};
}

template <class T>
void read_field(const json& obj, const char* key, T& out, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string(where) + " field '" + key + "' has the wrong type");
  }
}

void reject_unknown(const json& obj, const std::set<std::string>& known, std::string_view where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw InputError("unknown " + std::string(where) + " field '" + key + "'");
  }
}

Hyperparameters hp_from_json(const json& j) {
  if (!j.is_object()) throw InputError("config field 'hyperparameters' must be an object");
  Hyperparameters hp;
  const std::set<std::string> known = {
      "n_estimators", "learning_rate", "gb_max_depth", "dt_max_depth", "rf_max_depth",
      "min_samples_leaf", "rf_bootstrap", "max_bins", "svm_c", "svm_gamma",
      "svr_epsilon", "svm_tol", "svm_max_iterations"};
  reject_unknown(j, known, "hyperparameter");
  const char* w = "hyperparameter";
  read_field(j, "n_estimators", hp.n_estimators, w);
  read_field(j, "learning_rate", hp.learning_rate, w);
  read_field(j, "gb_max_depth", hp.gb_max_depth, w);
  read_field(j, "dt_max_depth", hp.dt_max_depth, w);
  read_field(j, "rf_max_depth", hp.rf_max_depth, w);
  read_field(j, "min_samples_leaf", hp.min_samples_leaf, w);
  read_field(j, "rf_bootstrap", hp.rf_bootstrap, w);
  read_field(j, "max_bins", hp.max_bins, w);
  read_field(j, "svm_c", hp.svm_c, w);
  read_field(j, "svm_gamma", hp.svm_gamma, w);
  read_field(j, "svr_epsilon", hp.svr_epsilon, w);
  read_field(j, "svm_tol", hp.svm_tol, w);
  read_field(j, "svm_max_iterations", hp.svm_max_iterations, w);
  return hp;
}

json opt_path(const std::optional<std::filesystem::path>& p) {
  return p ? json(p->generic_string()) : json(nullptr);
}

std::filesystem::path resolve(const std::string& text, const std::filesystem::path& base) {
  std::filesystem::path p(text);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

}  // namespace

json config_to_json(const RunConfig& c) {
  return {{"train_manifest", c.train_manifest.generic_string()},
          {"train_ratings", opt_path(c.train_ratings)},
          {"test_manifest", opt_path(c.test_manifest)},
          {"test_ratings", opt_path(c.test_ratings)},
          {"modalities", names(c.modalities, modality_name)},
          {"scopes", names(c.scopes, scope_name)},
          {"window_s", c.window_s},
          {"functionals", names(c.functionals, functional_name)},
          {"families", names(c.families, family_name)},
          {"fusion_rules", names(c.fusion_rules, fusion_rule_name)},
          {"tasks", names(c.tasks, task_name)},
          {"k", c.k},
          {"fold_seed", c.fold_seed},
          {"model_seed", c.model_seed},
          {"threshold_mode", c.threshold_mode == ThresholdMode::kFixed ? "fixed" : "recompute"},
          {"threshold", c.threshold},
          {"confidence_threshold", c.confidence_threshold},
          {"normalize_pose", c.normalize_pose},
          {"hyperparameters", hp_to_json(c.hp)},
          {"output_dir", c.output_dir.generic_string()},
          {"workers", c.workers}};
}

RunConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw InputError("run config must be a JSON object");
  const std::set<std::string> known = {
      "train_manifest", "train_ratings", "test_manifest", "test_ratings", "modalities",
      "scopes", "window_s", "functionals", "families", "fusion_rules", "tasks", "k",
      "fold_seed", "model_seed", "threshold_mode", "threshold", "confidence_threshold",
      "normalize_pose", "hyperparameters", "output_dir", "workers"};
  reject_unknown(j, known, "config");

  RunConfig c;
  const char* w = "config";
  const auto path_field = [&](const char* key) -> std::optional<std::filesystem::path> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw InputError(std::string("config field '") + key + "' must be a path");
    return resolve(it->get<std::string>(), base_dir);
  };
  if (auto p = path_field("train_manifest")) c.train_manifest = *p;
  c.train_ratings = path_field("train_ratings");
  c.test_manifest = path_field("test_manifest");
  c.test_ratings = path_field("test_ratings");
  if (auto p = path_field("output_dir")) c.output_dir = *p;

  if (j.contains("modalities")) c.modalities = parse_list<Modality>(j["modalities"], "modalities", parse_modality);
  if (j.contains("scopes")) c.scopes = parse_list<FeatureScope>(j["scopes"], "scopes", parse_scope);
  if (j.contains("functionals")) {
    c.functionals = parse_list<Functional>(j["functionals"], "functionals", parse_functional);
  }
  if (j.contains("families")) c.families = parse_list<Family>(j["families"], "families", parse_family);
  if (j.contains("fusion_rules")) {
    c.fusion_rules = parse_list<FusionRule>(j["fusion_rules"], "fusion_rules", parse_fusion_rule);
  }
  if (j.contains("tasks")) c.tasks = parse_list<Task>(j["tasks"], "tasks", parse_task);
  read_field(j, "window_s", c.window_s, w);
  read_field(j, "k", c.k, w);
  read_field(j, "fold_seed", c.fold_seed, w);
  read_field(j, "model_seed", c.model_seed, w);
  if (j.contains("threshold_mode")) {
    std::string mode;
    read_field(j, "threshold_mode", mode, w);
    if (mode == "fixed") c.threshold_mode = ThresholdMode::kFixed;
    else if (mode == "recompute") c.threshold_mode = ThresholdMode::kRecompute;
    else throw InputError("config field 'threshold_mode' must be 'fixed' or 'recompute'");
  }
  read_field(j, "threshold", c.threshold, w);
  read_field(j, "confidence_threshold", c.confidence_threshold, w);
  read_field(j, "normalize_pose", c.normalize_pose, w);
  read_field(j, "workers", c.workers, w);
  if (j.contains("hyperparameters")) c.hp = hp_from_json(j["hyperparameters"]);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = util::read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

void validate_config(const RunConfig& c) {
  std::vector<std::string> problems;
  const auto check = [&](bool ok, std::string msg) {
    if (!ok) problems.push_back(std::move(msg));
  };
  const auto unique = [](auto values) {
    std::sort(values.begin(), values.end());
    return std::adjacent_find(values.begin(), values.end()) == values.end();
  };
  check(!c.train_manifest.empty(), "train_manifest: required");
  check(!c.modalities.empty(), "modalities: at least one required");
  check(unique(c.modalities), "modalities: duplicates");
  check(!c.scopes.empty(), "scopes: at least one required");
  check(unique(c.scopes), "scopes: duplicates");
  check(c.window_s > 0.0, "window_s: must be > 0");
  check(!c.functionals.empty(), "functionals: at least one required");
  check(unique(c.functionals), "functionals: duplicates");
  check(!c.families.empty(), "families: at least one required");
  check(unique(c.families), "families: duplicates");
  check(unique(c.fusion_rules), "fusion_rules: duplicates");
  check(!c.tasks.empty(), "tasks: at least one required");
  check(unique(c.tasks), "tasks: duplicates");
  check(c.k >= 2, "k: must be >= 2");
  check(c.threshold > 1.0 && c.threshold < 4.0, "threshold: must lie in (1, 4)");
  check(c.confidence_threshold >= 0.0 && c.confidence_threshold <= 1.0,
        "confidence_threshold: must lie in [0, 1]");
  check(c.workers >= 0, "workers: must be >= 0");
  check(!c.test_ratings || c.test_manifest, "test_ratings: given without test_manifest");
  const auto& hp = c.hp;
  check(hp.n_estimators >= 1, "hyperparameters.n_estimators: must be >= 1");
  check(hp.learning_rate > 0.0, "hyperparameters.learning_rate: must be > 0");
  check(hp.gb_max_depth >= 1, "hyperparameters.gb_max_depth: must be >= 1");
  check(hp.dt_max_depth >= 0, "hyperparameters.dt_max_depth: must be >= 0");
  check(hp.rf_max_depth >= 0, "hyperparameters.rf_max_depth: must be >= 0");
  check(hp.min_samples_leaf >= 1, "hyperparameters.min_samples_leaf: must be >= 1");
  check(hp.max_bins >= 2 && hp.max_bins <= models::kMaxBins,
        "hyperparameters.max_bins: must lie in [2, 256]");
  check(hp.svm_c > 0.0, "hyperparameters.svm_c: must be > 0");
  check(hp.svr_epsilon >= 0.0, "hyperparameters.svr_epsilon: must be >= 0");
  check(hp.svm_tol > 0.0, "hyperparameters.svm_tol: must be > 0");
  check(hp.svm_max_iterations >= 1, "hyperparameters.svm_max_iterations: must be >= 1");
  if (!problems.empty()) {
    std::string msg = "invalid run config:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw InputError(msg);
  }
}

std::string config_fingerprint(const RunConfig& config) {
  json j = config_to_json(config);
  j.erase("output_dir");
  j.erase("workers");
  return util::hex64(util::fnv1a64(j.dump()));
}

}  // namespace pcomp
