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

#ifndef PCOMP_CLI_HPP_
#define PCOMP_CLI_HPP_

#include <filesystem>
#include <optional>
#include <ostream>

#include "pcomp/config.hpp"
#include "pcomp/eval.hpp"
#include "pcomp/synth.hpp"

namespace pcomp::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailed = 1,
  kExitInputError = 2,
  kExitInternalError = 3,
};

// Writes a JSON report to `report_path` (when non-empty) and a summary to out.
int cmd_validate(const std::filesystem::path& manifest,
                 const std::optional<std::filesystem::path>& ratings,
                 const std::filesystem::path& report_path, std::ostream& out,
                 std::ostream& err);

// Runs the same-dataset protocol, or the cross-dataset one when the config
// names a test manifest, and writes config.json, folds.csv, results.csv,
// results.md, targets.csv and prediction dumps to the output directory.
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err,
            const RunHooks& hooks = {});

int cmd_synth(const synth::SynthSpec& spec, const std::filesystem::path& out_dir,
              const std::optional<synth::PairSpec>& pair, std::ostream& out,
              std::ostream& err);

// Re-renders results.csv and results.md from a stored folds.csv.
int cmd_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);

// Output directory used when the config leaves it empty:
// $PCOMP_OUTPUT_ROOT (or ./pcomp-runs) / <fingerprint>.
std::filesystem::path resolve_output_dir(const RunConfig& config);

}  // namespace pcomp::cli

#endif  // PCOMP_CLI_HPP_
