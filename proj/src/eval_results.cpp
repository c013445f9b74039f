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
#include <cstdio>
#include <map>
#include <tuple>

#include "pcomp/error.hpp"
#include "pcomp/eval.hpp"
#include "util.hpp"

namespace pcomp {

namespace {

std::string opt(const std::optional<double>& v) {
  return v ? util::format_double(*v) : std::string();
}

std::optional<double> parse_opt(std::string_view s, std::string_view ctx) {
  if (s.empty()) return std::nullopt;
  return util::parse_double(s, ctx);
}

// Commas and newlines would break the unquoted CSV layout.
std::string csv_safe(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

std::string key_columns(const CellKey& k) {
  std::string s(protocol_name(k.protocol));
  s += ',';
  s += scope_name(k.scope);
  s += ',';
  s += task_name(k.task);
  s += ',' + k.modalities + ',';
  s += family_name(k.family);
  s += ',' + k.fusion;
  return s;
}

Protocol parse_protocol(std::string_view s) {
  if (s == "same-dataset") return Protocol::kSameDataset;
  if (s == "cross-dataset") return Protocol::kCrossDataset;
  throw InputError("unknown protocol '" + std::string(s) + "'");
}

constexpr const char* kFoldsHeader =
    "fingerprint,protocol,scope,task,modalities,family,fusion,fold,accuracy,precision,"
    "recall,f1,mse,pearson_r,fusion_ties,status";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string mean_std(const ResultRow& row, std::optional<double> FoldMetrics::*m) {
  auto s = summarize(row, m);
  return s ? fmt(s->mean) + " ± " + fmt(s->std) : "n/a";
}

std::string feature_set_label(const CellKey& k) {
  return k.fusion == "none" ? k.modalities : k.fusion + " (" + k.modalities + ")";
}

}  // namespace

void write_folds_csv(const ResultTable& table, const std::filesystem::path& path) {
  std::string out = kFoldsHeader;
  out += '\n';
  for (const auto& row : table.rows) {
    const std::string prefix = table.fingerprint + ',' + key_columns(row.key) + ',';
    const std::string ties = std::to_string(row.fusion_ties);
    if (row.failed) {
      out += prefix + "failed,,,,,,," + ties + ",failed: " + csv_safe(row.error) + '\n';
      continue;
    }
    for (const auto& f : row.folds) {
      out += prefix + std::to_string(f.fold) + ',' + opt(f.accuracy) + ',' + opt(f.precision) +
             ',' + opt(f.recall) + ',' + opt(f.f1) + ',' + opt(f.mse) + ",," + ties + ",ok\n";
    }
    if (row.key.task == Task::kRegression) {
      out += prefix + "pooled,,,,,," + opt(row.pearson_r) + ',' + ties + ",ok\n";
    }
  }
  util::write_text_file(path, out);
}

ResultTable read_folds_csv(const std::filesystem::path& path) {
  util::CsvFile csv;
  util::read_csv(path, csv);
  std::string header;
  for (std::size_t i = 0; i < csv.header.size(); ++i) {
    header += (i ? "," : "") + csv.header[i];
  }
  if (header != kFoldsHeader) throw InputError(path.string() + ": not a folds table");
  ResultTable table;
  std::map<CellKey, std::size_t> index;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& c = csv.rows[r];
    const std::string ctx = path.string() + ":" + std::to_string(csv.line_numbers[r]);
    if (c.size() != 16) throw InputError(ctx + ": expected 16 fields");
    if (table.fingerprint.empty()) {
      table.fingerprint = std::string(c[0]);
    } else if (table.fingerprint != c[0]) {
      throw InputError(ctx + ": mixed config fingerprints");
    }
    CellKey key;
    key.protocol = parse_protocol(c[1]);
    key.scope = parse_scope(c[2]);
    key.task = parse_task(c[3]);
    key.modalities = std::string(c[4]);
    key.family = parse_family(c[5]);
    key.fusion = std::string(c[6]);
    auto [it, inserted] = index.emplace(key, table.rows.size());
    if (inserted) {
      table.rows.push_back({});
      table.rows.back().key = key;
    }
    ResultRow& row = table.rows[it->second];
    row.fusion_ties = static_cast<int>(util::parse_long(c[14], ctx));
    if (c[7] == "failed") {
      row.failed = true;
      std::string_view status = c[15];
      row.error = std::string(status.substr(std::min<std::size_t>(status.size(), 8)));
    } else if (c[7] == "pooled") {
      row.pearson_r = parse_opt(c[13], ctx);
    } else {
      FoldMetrics f;
      f.fold = static_cast<int>(util::parse_long(c[7], ctx));
      f.accuracy = parse_opt(c[8], ctx);
      f.precision = parse_opt(c[9], ctx);
      f.recall = parse_opt(c[10], ctx);
      f.f1 = parse_opt(c[11], ctx);
      f.mse = parse_opt(c[12], ctx);
      if (f.accuracy && !f.precision) ++row.undefined_precision_folds;
      row.folds.push_back(f);
    }
  }
  return table;
}

void write_results_csv(const ResultTable& table, const std::filesystem::path& path) {
  std::string out =
      "fingerprint,protocol,scope,task,modalities,family,fusion,n_folds,accuracy_mean,"
      "accuracy_std,precision_mean,precision_std,recall_mean,recall_std,f1_mean,f1_std,"
      "mse_mean,mse_std,pearson_r,undefined_precision_folds,fusion_ties,status\n";
  for (const auto& row : table.rows) {
    out += table.fingerprint + ',' + key_columns(row.key) + ',' + std::to_string(row.folds.size());
    for (auto m : {&FoldMetrics::accuracy, &FoldMetrics::precision, &FoldMetrics::recall,
                   &FoldMetrics::f1, &FoldMetrics::mse}) {
      auto s = summarize(row, m);
      out += ',' + (s ? util::format_double(s->mean) : "") + ',' +
             (s ? util::format_double(s->std) : "");
    }
    out += ',' + opt(row.pearson_r) + ',' + std::to_string(row.undefined_precision_folds) + ',' +
           std::to_string(row.fusion_ties) + ',' +
           (row.failed ? "failed: " + csv_safe(row.error) : std::string("ok")) + '\n';
  }
  util::write_text_file(path, out);
}

std::string render_markdown(const ResultTable& table) {
  std::string md = "# Results\n\nConfig fingerprint: `" + table.fingerprint + "`\n";
  // Group rows into blocks by (protocol, scope, task), keeping first-seen order.
  std::vector<std::tuple<Protocol, FeatureScope, Task>> blocks;
  for (const auto& r : table.rows) {
    auto b = std::make_tuple(r.key.protocol, r.key.scope, r.key.task);
    if (std::find(blocks.begin(), blocks.end(), b) == blocks.end()) blocks.push_back(b);
  }
  for (const auto& [protocol, scope, task] : blocks) {
    md += "\n## " + std::string(protocol_name(protocol)) + ", " + std::string(scope_name(scope)) +
          " features, " + std::string(task_name(task)) + "\n\n";
    std::vector<Family> families;
    std::vector<std::string> sets;
    std::map<std::pair<std::string, Family>, const ResultRow*> cells;
    for (const auto& r : table.rows) {
      if (r.key.protocol != protocol || r.key.scope != scope || r.key.task != task) continue;
      if (std::find(families.begin(), families.end(), r.key.family) == families.end()) {
        families.push_back(r.key.family);
      }
      const std::string label = feature_set_label(r.key);
      if (std::find(sets.begin(), sets.end(), label) == sets.end()) sets.push_back(label);
      cells[{label, r.key.family}] = &r;
    }
    const bool cls = task == Task::kClassification;
    md += cls ? "Accuracy (mean ± std over folds)\n\n" : "MSE (mean ± std over folds) / pooled r\n\n";
    md += "| Feature set |";
    for (Family f : families) md += " " + std::string(family_name(f)) + " |";
    md += "\n|---|";
    for (std::size_t i = 0; i < families.size(); ++i) md += "---|";
    md += "\n";
    for (const auto& s : sets) {
      md += "| " + s + " |";
      for (Family f : families) {
        auto it = cells.find({s, f});
        std::string cell = "";
        if (it != cells.end()) {
          const ResultRow& r = *it->second;
          if (r.failed) {
            cell = "failed";
          } else if (cls) {
            cell = mean_std(r, &FoldMetrics::accuracy);
          } else {
            cell = mean_std(r, &FoldMetrics::mse) + " / " + (r.pearson_r ? fmt(*r.pearson_r) : "n/a");
          }
        }
        md += " " + cell + " |";
      }
      md += "\n";
    }
    if (cls) {
      md += "\n| Feature set | Family | Precision | Recall | F1 | Undefined precision folds | Fusion ties |\n";
      md += "|---|---|---|---|---|---|---|\n";
      for (const auto& s : sets) {
        for (Family f : families) {
          auto it = cells.find({s, f});
          if (it == cells.end() || it->second->failed) continue;
          const ResultRow& r = *it->second;
          md += "| " + s + " | " + std::string(family_name(f)) + " | " +
                mean_std(r, &FoldMetrics::precision) + " | " + mean_std(r, &FoldMetrics::recall) +
                " | " + mean_std(r, &FoldMetrics::f1) + " | " +
                std::to_string(r.undefined_precision_folds) + " | " +
                std::to_string(r.fusion_ties) + " |\n";
        }
      }
    }
    for (const auto& r : table.rows) {
      if (r.failed && r.key.protocol == protocol && r.key.scope == scope && r.key.task == task) {
        md += "\nFailed: " + feature_set_label(r.key) + " / " + std::string(family_name(r.key.family)) +
              ": " + r.error + "\n";
      }
    }
  }
  return md;
}

}  // namespace pcomp
