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

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pcomp/cli.hpp"
#include "pcomp/config.hpp"
#include "pcomp/error.hpp"
#include "pcomp/eval.hpp"
#include "pcomp/fusion.hpp"
#include "pcomp/ingest.hpp"
#include "pcomp/labels.hpp"
#include "pcomp/synth.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

using CommandResult = std::tuple<int, std::string, std::string>;

std::vector<pcomp::CompetenceClass> to_classes(const std::vector<int>& v) {
  std::vector<pcomp::CompetenceClass> out;
  out.reserve(v.size());
  for (int x : v) {
    if (x != 0 && x != 1) throw pcomp::InputError("class labels must be 0 (low) or 1 (high)");
    out.push_back(static_cast<pcomp::CompetenceClass>(x));
  }
  return out;
}

// Commands release the GIL; they may run for minutes.
template <class Fn>
CommandResult capture(Fn&& fn) {
  std::ostringstream out, err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = fn(out, err);
  }
  return {code, out.str(), err.str()};
}

}  // namespace

PYBIND11_MODULE(_pcomp, m) {
  m.doc() = "Presentation competence estimation from nonverbal features";

  // Registered base first so the more specific translators take precedence.
  auto& base = py::register_exception<pcomp::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<pcomp::InputError>(m, "InputError", base);
  py::register_exception<pcomp::DomainError>(m, "DomainError", base);

  m.def(
      "validate",
      [](const std::string& manifest, std::optional<std::string> ratings) {
        const pcomp::Manifest man = pcomp::load_manifest(manifest);
        const auto path = ratings ? std::optional<std::filesystem::path>(*ratings) : man.ratings_path;
        if (!path) throw pcomp::InputError("no ratings file given and none declared in the manifest");
        return pcomp::validate_dataset(man, pcomp::load_ratings(*path)).to_json();
      },
      py::arg("manifest"), py::arg("ratings") = py::none(),
      "Validates a dataset and returns the report as JSON text.");

  m.def(
      "synth",
      [](const std::string& spec_json, const std::string& out_dir,
         std::optional<std::string> pair_json) {
        const auto spec = pcomp::synth::spec_from_json(json::parse(spec_json));
        std::optional<pcomp::synth::PairSpec> pair;
        if (pair_json) pair = pcomp::synth::pair_from_json(json::parse(*pair_json));
        return capture([&](std::ostream& o, std::ostream& e) {
          return pcomp::cli::cmd_synth(spec, out_dir, pair, o, e);
        });
      },
      py::arg("spec_json"), py::arg("out_dir"), py::arg("pair_json") = py::none(),
      "Generates a synthetic dataset; returns (exit_code, stdout, stderr).");

  m.def(
      "run",
      [](const std::string& config_json, const std::string& base_dir) {
        const pcomp::RunConfig config = pcomp::config_from_json(json::parse(config_json), base_dir);
        return capture([&](std::ostream& o, std::ostream& e) { return pcomp::cli::cmd_run(config, o, e); });
      },
      py::arg("config_json"), py::arg("base_dir") = "",
      "Runs an experiment; returns (exit_code, stdout, stderr).");

  m.def(
      "report",
      [](const std::string& run_dir) {
        return capture([&](std::ostream& o, std::ostream& e) { return pcomp::cli::cmd_report(run_dir, o, e); });
      },
      py::arg("run_dir"));

  m.def(
      "config_fingerprint",
      [](const std::string& config_json) {
        return pcomp::config_fingerprint(pcomp::config_from_json(json::parse(config_json)));
      },
      py::arg("config_json"));

  m.def(
      "default_config",
      [] { return pcomp::config_to_json(pcomp::RunConfig{}).dump(); },
      "Default run configuration as JSON text.");

  m.def(
      "classification_metrics",
      [](const std::vector<int>& y_true, const std::vector<int>& y_pred) {
        const auto r = pcomp::classification_metrics(to_classes(y_true), to_classes(y_pred));
        py::dict d;
        d["accuracy"] = r.accuracy;
        d["precision"] = r.precision ? py::cast(*r.precision) : py::none();
        d["recall"] = r.recall ? py::cast(*r.recall) : py::none();
        d["f1"] = r.f1;
        return d;
      },
      py::arg("y_true"), py::arg("y_pred"));
  m.def("mse", [](const std::vector<double>& a, const std::vector<double>& b) { return pcomp::mse(a, b); });
  m.def("pearson_r",
        [](const std::vector<double>& a, const std::vector<double>& b) { return pcomp::pearson_r(a, b); });

  m.def(
      "icc_a_k",
      [](const std::vector<std::vector<double>>& rows) {
        pcomp::Matrix x;
        for (const auto& r : rows) x.append_row(r);
        return pcomp::icc_a_k(x);
      },
      py::arg("ratings"), "ICC(A,k) of a targets x raters matrix.");

  m.def(
      "late_fuse",
      [](const std::vector<std::vector<double>>& probs, const std::string& rule) {
        const auto d = pcomp::late_fuse_class(probs, pcomp::parse_fusion_rule(rule));
        return py::make_tuple(d.normalized, d.argmax);
      },
      py::arg("probs"), py::arg("rule"), "Returns (normalized scores, winning class).");
}
