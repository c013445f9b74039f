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

// pcomp command-line tool: validate, synth, run, report.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pcomp/cli.hpp"
#include "pcomp/error.hpp"

namespace {

template <class T, class Parse>
std::vector<T> parse_all(const std::vector<std::string>& names, Parse parse) {
  std::vector<T> out;
  for (const auto& n : names) out.push_back(parse(n));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace pcomp;
  CLI::App app{"Presentation competence estimation from speech, face and pose features"};
  app.require_subcommand(1);

  // validate
  auto* validate = app.add_subcommand("validate", "Check a dataset manifest, its tables and ratings");
  std::string v_manifest, v_ratings, v_report;
  validate->add_option("manifest", v_manifest, "Manifest JSON")->required();
  validate->add_option("--ratings", v_ratings, "Ratings CSV (default: the manifest's entry)");
  validate->add_option("--report", v_report, "Write the JSON report here");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::string s_spec, s_out, s_pair_spec;
  bool s_pair = false;
  std::optional<std::uint64_t> s_seed;
  std::optional<double> s_signal, s_noise;
  std::optional<int> s_videos;
  synth_cmd->add_option("--spec", s_spec, "Synth spec JSON (default: built-in defaults)");
  synth_cmd->add_option("--out", s_out, "Output directory")->required();
  synth_cmd->add_flag("--pair", s_pair, "Also generate a linked second-round dataset (T1/ and T2/)");
  synth_cmd->add_option("--pair-spec", s_pair_spec, "Pair spec JSON (implies --pair)");
  synth_cmd->add_option("--seed", s_seed, "Override the spec seed");
  synth_cmd->add_option("--signal", s_signal, "Set every modality's signal strength");
  synth_cmd->add_option("--rater-noise", s_noise, "Override rater_noise_sd");
  synth_cmd->add_option("--videos", s_videos, "Override n_videos and n_persons");

  // run
  auto* run = app.add_subcommand("run", "Run the experiment grid");
  std::string r_config;
  std::optional<std::string> r_train, r_train_ratings, r_test, r_test_ratings, r_out, r_mode;
  std::vector<std::string> r_modalities, r_scopes, r_functionals, r_families, r_fusion, r_tasks;
  std::optional<double> r_window, r_threshold, r_confidence, r_lr, r_svm_c, r_gamma, r_eps;
  std::optional<int> r_k, r_workers, r_estimators;
  std::optional<std::uint64_t> r_seed, r_fold_seed, r_model_seed;
  bool r_no_pose_norm = false, r_print = false;
  run->add_option("--config", r_config, "Run config JSON");
  run->add_option("--train", r_train, "Training manifest");
  run->add_option("--train-ratings", r_train_ratings, "Training ratings CSV");
  run->add_option("--test", r_test, "Test manifest (selects the cross-dataset protocol)");
  run->add_option("--test-ratings", r_test_ratings, "Test ratings CSV");
  run->add_option("--modalities", r_modalities, "speech, face, pose");
  run->add_option("--scope", r_scopes, "global, local");
  run->add_option("--window", r_window, "Window length in seconds");
  run->add_option("--functionals", r_functionals, "mean, std, min, max, range, median");
  run->add_option("--families", r_families, "GB, DT, RF, SVM");
  run->add_option("--fusion", r_fusion, "FF, LF_median, LF_product, LF_sum, or none");
  run->add_option("--task", r_tasks, "classification, regression or both");
  run->add_option("--k", r_k, "Number of folds");
  run->add_option("--seed", r_seed, "Set both fold and model seeds");
  run->add_option("--fold-seed", r_fold_seed, "Fold assignment seed");
  run->add_option("--model-seed", r_model_seed, "Model seed");
  run->add_option("--threshold", r_threshold, "Fixed competence threshold");
  run->add_option("--threshold-mode", r_mode, "fixed or recompute");
  run->add_option("--confidence", r_confidence, "Minimum frame confidence");
  run->add_flag("--no-pose-normalization", r_no_pose_norm, "Use raw pose coordinates");
  run->add_option("--n-estimators", r_estimators, "GB/RF ensemble size");
  run->add_option("--learning-rate", r_lr, "GB learning rate");
  run->add_option("--svm-c", r_svm_c, "SVM C");
  run->add_option("--svm-gamma", r_gamma, "RBF gamma (<= 0: automatic)");
  run->add_option("--svr-epsilon", r_eps, "SVR epsilon");
  run->add_option("--out", r_out, "Output directory (default: $PCOMP_OUTPUT_ROOT/<fingerprint>)");
  run->add_option("--workers", r_workers, "Worker threads (0: all cores)");
  run->add_flag("--print-config", r_print, "Print the resolved config and exit");

  // report
  auto* report = app.add_subcommand("report", "Re-render result tables from a run's folds.csv");
  std::string p_dir;
  report->add_option("run_dir", p_dir, "Run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitInputError;
  }

  try {
    if (*validate) {
      std::optional<std::filesystem::path> ratings;
      if (!v_ratings.empty()) ratings = v_ratings;
      return cli::cmd_validate(v_manifest, ratings, v_report, std::cout, std::cerr);
    }

    if (*synth_cmd) {
      synth::SynthSpec spec = s_spec.empty() ? synth::SynthSpec{} : synth::load_spec(s_spec);
      if (s_seed) spec.seed = *s_seed;
      if (s_signal) {
        for (Modality m : kAllModalities) spec.signal_strength[m] = *s_signal;
      }
      if (s_noise) spec.rater_noise_sd = *s_noise;
      if (s_videos) spec.n_videos = spec.n_persons = *s_videos;
      std::optional<synth::PairSpec> pair;
      if (!s_pair_spec.empty()) {
        pair = synth::pair_from_json(nlohmann::json::parse(std::ifstream(s_pair_spec)));
      } else if (s_pair) {
        pair = synth::PairSpec{};
      }
      return cli::cmd_synth(spec, s_out, pair, std::cout, std::cerr);
    }

    if (*run) {
      RunConfig c = r_config.empty() ? RunConfig{} : load_config(r_config);
      if (r_train) c.train_manifest = *r_train;
      if (r_train_ratings) c.train_ratings = *r_train_ratings;
      if (r_test) c.test_manifest = *r_test;
      if (r_test_ratings) c.test_ratings = *r_test_ratings;
      if (!r_modalities.empty()) c.modalities = parse_all<Modality>(r_modalities, parse_modality);
      if (!r_scopes.empty()) c.scopes = parse_all<FeatureScope>(r_scopes, parse_scope);
      if (r_window) c.window_s = *r_window;
      if (!r_functionals.empty()) c.functionals = parse_all<Functional>(r_functionals, parse_functional);
      if (!r_families.empty()) c.families = parse_all<Family>(r_families, parse_family);
      if (!r_fusion.empty()) {
        c.fusion_rules.clear();
        for (const auto& f : r_fusion) {
          if (f != "none") c.fusion_rules.push_back(parse_fusion_rule(f));
        }
      }
      if (!r_tasks.empty()) {
        c.tasks.clear();
        for (const auto& t : r_tasks) {
          if (t == "both") {
            c.tasks = {Task::kClassification, Task::kRegression};
          } else {
            c.tasks.push_back(parse_task(t));
          }
        }
      }
      if (r_k) c.k = *r_k;
      if (r_seed) c.fold_seed = c.model_seed = *r_seed;
      if (r_fold_seed) c.fold_seed = *r_fold_seed;
      if (r_model_seed) c.model_seed = *r_model_seed;
      if (r_threshold) {
        c.threshold = *r_threshold;
        c.threshold_mode = ThresholdMode::kFixed;
      }
      if (r_mode) {
        if (*r_mode == "fixed") c.threshold_mode = ThresholdMode::kFixed;
        else if (*r_mode == "recompute") c.threshold_mode = ThresholdMode::kRecompute;
        else throw InputError("--threshold-mode must be fixed or recompute");
      }
      if (r_confidence) c.confidence_threshold = *r_confidence;
      if (r_no_pose_norm) c.normalize_pose = false;
      if (r_estimators) c.hp.n_estimators = *r_estimators;
      if (r_lr) c.hp.learning_rate = *r_lr;
      if (r_svm_c) c.hp.svm_c = *r_svm_c;
      if (r_gamma) c.hp.svm_gamma = *r_gamma;
      if (r_eps) c.hp.svr_epsilon = *r_eps;
      if (r_out) c.output_dir = *r_out;
      if (r_workers) c.workers = *r_workers;
      if (r_print) {
        auto j = config_to_json(c);
        j["fingerprint"] = config_fingerprint(c);
        std::cout << j.dump(2) << '\n';
        return cli::kExitOk;
      }
      return cli::cmd_run(c, std::cout, std::cerr);
    }

    if (*report) return cli::cmd_report(p_dir, std::cout, std::cerr);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitInputError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return cli::kExitInternalError;
  }
  return cli::kExitInternalError;
}
