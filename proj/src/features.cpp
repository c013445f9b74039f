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

#include "pcomp/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcomp/error.hpp"
#include "pcomp/stats.hpp"
#include "util.hpp"

namespace pcomp {

namespace {
// Absorbs rounding in accumulated timestamps (e.g. 179.8 + 0.2).
constexpr double kTimeEps = 1e-9;
}  // namespace

std::string_view functional_name(Functional f) {
  switch (f) {
    case Functional::kMean: return "mean";
    case Functional::kStd: return "std";
    case Functional::kMin: return "min";
    case Functional::kMax: return "max";
    case Functional::kRange: return "range";
    case Functional::kMedian: return "median";
  }
  return "?";
}

Functional parse_functional(std::string_view name) {
  for (Functional f : {Functional::kMean, Functional::kStd, Functional::kMin, Functional::kMax,
                       Functional::kRange, Functional::kMedian}) {
    if (functional_name(f) == name) return f;
  }
  throw InputError("unknown functional '" + std::string(name) + "'");
}

std::vector<Functional> default_functionals() {
  return {Functional::kMean, Functional::kStd, Functional::kMin, Functional::kMax};
}

// ---------------------------------------------------------------------------
// Windowing

WindowPlan plan_windows(double start_s, double end_s, double window_s) {
  if (!(window_s > 0.0)) throw InputError("window length must be > 0");
  WindowPlan plan;
  const double span = end_s - start_s;
  if (span < window_s / 2.0 - kTimeEps) {
    plan.fallback = true;
    plan.windows.push_back({0, start_s, std::max(end_s, start_s)});
    return plan;
  }
  const int full = static_cast<int>(std::floor(span / window_s + kTimeEps));
  for (int i = 0; i < full; ++i) {
    plan.windows.push_back({i, start_s + i * window_s, start_s + (i + 1) * window_s});
  }
  const double remainder = span - full * window_s;
  if (remainder >= window_s / 2.0 - kTimeEps) {
    plan.windows.push_back({full, start_s + full * window_s, end_s});
  }
  return plan;
}

namespace {

FeatureTable slice_rows(const FeatureTable& t, std::size_t begin, std::size_t end) {
  FeatureTable out;
  out.modality = t.modality;
  out.columns = t.columns;
  out.timestamps.assign(t.timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                        t.timestamps.begin() + static_cast<std::ptrdiff_t>(end));
  out.values.assign(t.values.begin() + static_cast<std::ptrdiff_t>(begin * t.cols()),
                    t.values.begin() + static_cast<std::ptrdiff_t>(end * t.cols()));
  if (!t.confidence.empty()) {
    out.confidence.assign(t.confidence.begin() + static_cast<std::ptrdiff_t>(begin),
                          t.confidence.begin() + static_cast<std::ptrdiff_t>(end));
  }
  out.rows_total = end - begin;
  return out;
}

double median_step(const FeatureTable& t) {
  std::vector<double> steps;
  steps.reserve(t.rows());
  for (std::size_t i = 1; i < t.rows(); ++i) steps.push_back(t.timestamps[i] - t.timestamps[i - 1]);
  return stats::median(steps);
}

}  // namespace

std::vector<WindowSlice> segment_windows(const FeatureTable& table, const WindowPlan& plan) {
  if (table.rows() == 0) throw InputError("cannot segment an empty table");
  std::vector<WindowSlice> out;
  if (plan.fallback) {
    out.push_back({plan.windows.front(), table, true});
    return out;
  }
  const auto& ts = table.timestamps;
  for (std::size_t w = 0; w < plan.windows.size(); ++w) {
    const Window& win = plan.windows[w];
    const bool last = w + 1 == plan.windows.size();
    // Rows in [start, end); the boundary tolerance only applies between
    // windows so that a row lands in exactly one window.
    const auto lo = std::lower_bound(ts.begin(), ts.end(), win.start_s - kTimeEps);
    auto hi = std::lower_bound(ts.begin(), ts.end(), win.end_s - kTimeEps);
    if (last) hi = std::lower_bound(ts.begin(), ts.end(), win.end_s);
    if (hi <= lo) continue;
    out.push_back({win, slice_rows(table, static_cast<std::size_t>(lo - ts.begin()),
                                   static_cast<std::size_t>(hi - ts.begin())),
                   false});
  }
  return out;
}

std::vector<WindowSlice> segment_windows(const FeatureTable& table, double window_s) {
  if (table.rows() == 0) throw InputError("cannot segment an empty table");
  const double start = table.timestamps.front();
  double end = table.timestamps.back();
  if (table.rows() >= 2) end += median_step(table);
  return segment_windows(table, plan_windows(start, end, window_s));
}

// ---------------------------------------------------------------------------
// Aggregation

namespace {

double apply_functional(Functional f, std::span<const double> col) {
  switch (f) {
    case Functional::kMean: return stats::mean(col);
    case Functional::kStd: return stats::population_std(col);
    case Functional::kMin: return *std::min_element(col.begin(), col.end());
    case Functional::kMax: return *std::max_element(col.begin(), col.end());
    case Functional::kRange: {
      auto [lo, hi] = std::minmax_element(col.begin(), col.end());
      return *hi - *lo;
    }
    case Functional::kMedian: return stats::median(col);
  }
  return 0.0;
}

}  // namespace

FeatureVector aggregate(const FeatureTable& table, std::span<const Functional> functionals,
                        std::string video_id, std::optional<Window> window) {
  if (table.rows() == 0) throw InputError("cannot aggregate an empty table");
  FeatureVector v;
  v.video_id = std::move(video_id);
  v.modality = std::string(modality_name(table.modality));
  v.window = window;
  const std::size_t n = table.rows();
  const std::size_t c = table.cols();

  if (table.modality == Modality::kSpeech) {
    v.names = table.columns;
    v.values.assign(c, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < c; ++j) v.values[j] += table.at(r, j);
    }
    if (n > 1) {
      for (double& x : v.values) x /= static_cast<double>(n);
    }
  } else {
    if (functionals.empty()) throw InputError("no functionals selected");
    v.values.reserve(c * functionals.size());
    v.names.reserve(c * functionals.size());
    std::vector<double> col(n);
    for (std::size_t j = 0; j < c; ++j) {
      for (std::size_t r = 0; r < n; ++r) col[r] = table.at(r, j);
      for (Functional f : functionals) {
        v.values.push_back(apply_functional(f, col));
        v.names.push_back(table.columns[j] + "_" + std::string(functional_name(f)));
      }
    }
  }
  for (double x : v.values) {
    if (!std::isfinite(x)) throw DomainError("non-finite aggregated feature for " + v.video_id);
  }
  return v;
}

FeatureTable normalize_pose(const FeatureTable& table) {
  if (table.modality != Modality::kPose) throw InputError("normalize_pose expects a pose table");
  FeatureTable out;
  out.modality = table.modality;
  out.columns = table.columns;
  out.rows_total = table.rows_total;
  out.rows_dropped = table.rows_dropped;
  const std::size_t c = table.cols();
  std::vector<double> row(c);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const auto in = table.row(r);
    const double nx = in[2 * schema::kNeck];
    const double ny = in[2 * schema::kNeck + 1];
    const double dx = in[2 * schema::kRightShoulder] - in[2 * schema::kLeftShoulder];
    const double dy = in[2 * schema::kRightShoulder + 1] - in[2 * schema::kLeftShoulder + 1];
    const double scale = std::hypot(dx, dy);
    if (!(scale > 1e-9) || !std::isfinite(scale)) {
      ++out.rows_dropped;
      continue;
    }
    for (std::size_t k = 0; k < schema::kPoseJoints; ++k) {
      row[2 * k] = (in[2 * k] - nx) / scale;
      row[2 * k + 1] = (in[2 * k + 1] - ny) / scale;
    }
    out.timestamps.push_back(table.timestamps[r]);
    out.values.insert(out.values.end(), row.begin(), row.end());
    if (!table.confidence.empty()) out.confidence.push_back(table.confidence[r]);
  }
  if (out.rows() == 0) throw InputError("no pose frames with a usable shoulder distance");
  return out;
}

// ---------------------------------------------------------------------------
// Standardization

Standardizer::Standardizer(std::vector<double> means, std::vector<double> stds)
    : means_(std::move(means)), stds_(std::move(stds)) {
  if (means_.size() != stds_.size()) throw InputError("standardizer mean/std length mismatch");
}

Standardizer Standardizer::fit(const Matrix& x) {
  if (x.rows() < 1) throw InputError("cannot fit a standardizer on no samples");
  const std::size_t d = x.cols();
  const double n = static_cast<double>(x.rows());
  std::vector<double> means(d, 0.0), stds(d, 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t j = 0; j < d; ++j) means[j] += x(r, j);
  }
  for (double& m : means) m /= n;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t j = 0; j < d; ++j) {
      const double e = x(r, j) - means[j];
      stds[j] += e * e;
    }
  }
  for (double& s : stds) s = std::sqrt(s / n);
  return Standardizer(std::move(means), std::move(stds));
}

std::vector<std::size_t> Standardizer::constant_dims() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < stds_.size(); ++j) {
    if (stds_[j] == 0.0) out.push_back(j);
  }
  return out;
}

std::vector<double> Standardizer::transform(std::span<const double> v) const {
  if (v.size() != dims()) {
    throw InputError("standardizer expects " + std::to_string(dims()) + " dimensions, got " +
                     std::to_string(v.size()));
  }
  std::vector<double> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    out[j] = stds_[j] == 0.0 ? 0.0 : (v[j] - means_[j]) / stds_[j];
  }
  return out;
}

Matrix Standardizer::transform(const Matrix& x) const {
  if (x.cols() != dims()) {
    throw InputError("standardizer expects " + std::to_string(dims()) + " dimensions, got " +
                     std::to_string(x.cols()));
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto in = x.row(r);
    auto o = out.row(r);
    for (std::size_t j = 0; j < in.size(); ++j) {
      o[j] = stds_[j] == 0.0 ? 0.0 : (in[j] - means_[j]) / stds_[j];
    }
  }
  return out;
}

Matrix to_matrix(std::span<const FeatureVector> vectors) {
  Matrix m;
  for (const auto& v : vectors) m.append_row(v.values);
  return m;
}

Standardizer fit_standardizer(std::span<const FeatureVector> vectors) {
  if (vectors.size() < 2) throw InputError("fit_standardizer needs at least 2 vectors");
  return Standardizer::fit(to_matrix(vectors));
}

FeatureVector apply_standardizer(const Standardizer& s, const FeatureVector& v) {
  FeatureVector out = v;
  out.values = s.transform(v.values);
  return out;
}

void write_vectors_csv(std::span<const FeatureVector> vectors,
                       const std::filesystem::path& path) {
  std::string out = "video_id,modality,scope,window_index,start_s,end_s";
  if (!vectors.empty()) {
    for (const auto& n : vectors.front().names) out += "," + n;
  }
  out += '\n';
  for (const auto& v : vectors) {
    if (!vectors.empty() && v.values.size() != vectors.front().values.size()) {
      throw InputError("write_vectors_csv: vectors of different lengths");
    }
    out += v.video_id + "," + v.modality + "," + (v.window ? "window" : "global") + ",";
    if (v.window) {
      out += std::to_string(v.window->index) + "," + util::format_double(v.window->start_s) +
             "," + util::format_double(v.window->end_s);
    } else {
      out += ",,";
    }
    for (double x : v.values) out += "," + util::format_double(x);
    out += '\n';
  }
  util::write_text_file(path, out);
}

VideoFeatures extract_features(const FeatureTable& table, std::string_view video_id,
                               double duration_s, const ExtractionOptions& options) {
  const FeatureTable prepared = (table.modality == Modality::kPose && options.normalize_pose)
                                    ? normalize_pose(table)
                                    : table;
  VideoFeatures out;
  out.video_id = std::string(video_id);
  out.global = aggregate(prepared, options.functionals, out.video_id);
  const WindowPlan plan = plan_windows(0.0, duration_s, options.window_s);
  for (const auto& slice : segment_windows(prepared, plan)) {
    out.windows.push_back(aggregate(slice.table, options.functionals, out.video_id, slice.window));
  }
  return out;
}

}  // namespace pcomp
