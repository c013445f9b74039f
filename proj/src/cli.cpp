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

#include "pcomp/cli.hpp"

#include <cstdlib>

#include <nlohmann/json.hpp>

#include "pcomp/error.hpp"
#include "util.hpp"

namespace pcomp::cli {

namespace {

// Maps exceptions to the exit-code contract.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternalError;
  }
}

std::vector<CompetenceTarget> targets_of(const PreparedDataset& d, double threshold) {
  std::vector<CompetenceTarget> t;
  for (const auto& v : d.videos) t.push_back({v.video_id, v.score, discretize(v.score, {threshold})});
  return t;
}

}  // namespace

std::filesystem::path resolve_output_dir(const RunConfig& config) {
  if (!config.output_dir.empty()) return config.output_dir;
  const char* root = std::getenv("PCOMP_OUTPUT_ROOT");
  const std::filesystem::path base = root && *root ? root : "pcomp-runs";
  return base / config_fingerprint(config);
}

int cmd_validate(const std::filesystem::path& manifest_path,
                 const std::optional<std::filesystem::path>& ratings_path,
                 const std::filesystem::path& report_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Manifest manifest = load_manifest(manifest_path);
    const auto rpath = ratings_path ? ratings_path : manifest.ratings_path;
    if (!rpath) throw InputError("no ratings file given and none declared in the manifest");
    const RatingTable ratings = load_ratings(*rpath);
    const ValidationReport report = validate_dataset(manifest, ratings);
    if (!report_path.empty()) util::write_text_file(report_path, report.to_json() + "\n");
    for (const auto& issue : report.issues) out << "issue: " << issue << '\n';
    out << (report.pass ? "PASS" : "FAIL") << ": " << manifest.videos.size() << " videos, "
        << report.issues.size() << " issues\n";
    if (report.unreadable_files > 0) return static_cast<int>(kExitInputError);
    return static_cast<int>(report.pass ? kExitOk : kExitValidationFailed);
  });
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err, const RunHooks& hooks) {
  return guarded(err, [&] {
    validate_config(config);
    const std::string fingerprint = config_fingerprint(config);
    const auto dir = resolve_output_dir(config);

    const PreparedDataset train = prepare_dataset(config.train_manifest, config.train_ratings, config);
    std::optional<PreparedDataset> test;
    if (config.cross_dataset()) test = prepare_dataset(*config.test_manifest, config.test_ratings, config);
    const RunOutput result =
        test ? run_cross_dataset(config, train, *test, hooks) : run_same_dataset(config, train, hooks);

    nlohmann::json cfg = config_to_json(config);
    cfg["fingerprint"] = fingerprint;
    cfg["protocol"] = std::string(protocol_name(test ? Protocol::kCrossDataset : Protocol::kSameDataset));
    cfg["threshold_used"] = result.threshold;
    cfg["notes"] = result.notes;
    util::write_text_file(dir / "config.json", cfg.dump(2) + "\n");
    write_folds_csv(result.table, dir / "folds.csv");
    write_results_csv(result.table, dir / "results.csv");
    util::write_text_file(dir / "results.md", render_markdown(result.table));
    write_targets_csv(targets_of(train, result.threshold), result.threshold, dir / "targets.csv");
    if (test) {
      write_targets_csv(targets_of(*test, result.threshold), result.threshold,
                        dir / "targets_test.csv");
    }
    write_video_predictions_csv(result.videos, fingerprint, dir / "predictions_video.csv");
    if (!result.windows.empty()) {
      write_window_predictions_csv(result.windows, fingerprint, dir / "predictions_window.csv");
    }

    std::size_t failed = 0;
    for (const auto& row : result.table.rows) failed += row.failed ? 1 : 0;
    for (const auto& note : result.notes) out << "note: " << note << '\n';
    out << "fingerprint " << fingerprint << ": " << result.table.rows.size() << " cells, "
        << failed << " failed; results in " << dir.string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_synth(const synth::SynthSpec& spec, const std::filesystem::path& out_dir,
              const std::optional<synth::PairSpec>& pair, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    nlohmann::json record = {{"spec", synth::spec_to_json(spec)}};
    if (pair) {
      const auto gp = synth::generate_pair(spec, *pair, out_dir);
      record["pair"] = synth::pair_to_json(*pair);
      out << "T1: " << gp.first.manifest_path.string() << " (rating/latent r "
          << util::format_double(gp.first.rating_latent_r) << ")\n";
      out << "T2: " << gp.second.manifest_path.string() << " (rating/latent r "
          << util::format_double(gp.second.rating_latent_r) << ")\n";
    } else {
      const auto g = synth::generate(spec, out_dir);
      out << "dataset: " << g.manifest_path.string() << " (rating/latent r "
          << util::format_double(g.rating_latent_r) << ")\n";
    }
    util::write_text_file(out_dir / "synth_spec.json", record.dump(2) + "\n");
    return static_cast<int>(kExitOk);
  });
}

int cmd_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ResultTable table = read_folds_csv(run_dir / "folds.csv");
    write_results_csv(table, run_dir / "results.csv");
    const std::string md = render_markdown(table);
    util::write_text_file(run_dir / "results.md", md);
    out << md;
    return static_cast<int>(kExitOk);
  });
}

}  // namespace pcomp::cli
