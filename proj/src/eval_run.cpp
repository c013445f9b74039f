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
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>
#include <variant>

#include "pcomp/error.hpp"
#include "pcomp/eval.hpp"
#include "pcomp/fusion.hpp"
#include "pcomp/stats.hpp"
#include "util.hpp"

namespace pcomp {

// ---------------------------------------------------------------------------
// Dataset preparation

PreparedDataset prepare_dataset(const std::filesystem::path& manifest_path,
                                const std::optional<std::filesystem::path>& ratings_path,
                                const RunConfig& config) {
  PreparedDataset out;
  out.manifest = load_manifest(manifest_path);
  const auto rpath = ratings_path ? ratings_path : out.manifest.ratings_path;
  if (!rpath) {
    throw InputError(manifest_path.string() + ": no ratings file given and none declared in the manifest");
  }
  const RatingTable ratings = load_ratings(*rpath);

  TableLoadOptions load_opts;
  load_opts.confidence_threshold = config.confidence_threshold;
  ExtractionOptions ext;
  ext.window_s = config.window_s;
  ext.functionals = config.functionals;
  ext.normalize_pose = config.normalize_pose;

  for (const auto& rec : out.manifest.videos) {
    VideoData v;
    v.video_id = rec.video_id;
    v.person_id = rec.person_id;
    v.score = competence_score(ratings, rec.video_id);
    std::optional<std::set<int>> common;
    for (Modality m : config.modalities) {
      if (!rec.has(m)) {
        throw InputError(std::string(modality_name(m)) + " table missing for " + rec.video_id);
      }
      const FeatureTable table = load_feature_table(rec.modality_paths.at(m), m, load_opts);
      VideoFeatures f = extract_features(table, rec.video_id, rec.duration_s, ext);
      std::set<int> idx;
      for (const auto& w : f.windows) idx.insert(w.window->index);
      if (!common) {
        common = std::move(idx);
      } else {
        std::set<int> both;
        std::set_intersection(common->begin(), common->end(), idx.begin(), idx.end(),
                              std::inserter(both, both.begin()));
        common = std::move(both);
      }
      v.features.emplace(m, std::move(f));
    }
    if (common) v.common_windows.assign(common->begin(), common->end());
    out.videos.push_back(std::move(v));
  }
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Sample assembly

struct FeatureSet {
  std::string name;  // modality name, or '+'-joined modalities for FF
  std::vector<Modality> modalities;
};

struct Rows {
  Matrix x;
  std::vector<std::size_t> video;    // index into the dataset's videos
  std::vector<std::optional<Window>> window;
};

const FeatureVector& window_vector(const VideoFeatures& f, int index) {
  for (const auto& w : f.windows) {
    if (w.window->index == index) return w;
  }
  throw InputError("window " + std::to_string(index) + " missing for " + f.video_id);
}

Rows build_rows(const PreparedDataset& d, std::span<const std::size_t> videos,
                std::span<const Modality> mods, FeatureScope scope) {
  Rows r;
  std::vector<double> row;
  for (std::size_t vi : videos) {
    const VideoData& v = d.videos[vi];
    if (scope == FeatureScope::kGlobal) {
      row.clear();
      for (Modality m : mods) {
        const auto& vals = v.features.at(m).global.values;
        row.insert(row.end(), vals.begin(), vals.end());
      }
      r.x.append_row(row);
      r.video.push_back(vi);
      r.window.push_back(std::nullopt);
      continue;
    }
    for (int w : v.common_windows) {
      row.clear();
      std::optional<Window> win;
      for (Modality m : mods) {
        const FeatureVector& fv = window_vector(v.features.at(m), w);
        row.insert(row.end(), fv.values.begin(), fv.values.end());
        win = fv.window;
      }
      r.x.append_row(row);
      r.video.push_back(vi);
      r.window.push_back(win);
    }
  }
  return r;
}

std::string join_modalities(std::span<const Modality> mods) {
  std::string s;
  for (Modality m : mods) {
    if (!s.empty()) s += '+';
    s += modality_name(m);
  }
  return s;
}

std::vector<Modality> canonical(const std::vector<Modality>& mods) {
  std::vector<Modality> out;
  for (Modality m : kAllModalities) {
    if (std::find(mods.begin(), mods.end(), m) != mods.end()) out.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Work units

struct Labels {
  std::vector<CompetenceClass> cls;
  std::vector<double> score;
};

Labels label_dataset(const PreparedDataset& d, double threshold) {
  Labels l;
  for (const auto& v : d.videos) {
    l.score.push_back(v.score);
    l.cls.push_back(discretize(v.score, {threshold}));
  }
  return l;
}

struct CellPlan {
  std::string modalities;
  std::string fusion;  // "none" or rule name
  std::optional<FusionRule> rule;
  std::optional<Modality> single;
};

std::vector<CellPlan> plan_cells(const RunConfig& config, Task task) {
  const auto mods = canonical(config.modalities);
  std::vector<CellPlan> cells;
  for (Modality m : mods) cells.push_back({std::string(modality_name(m)), "none", std::nullopt, m});
  if (mods.size() >= 2) {
    for (FusionRule rule : config.fusion_rules) {
      // Late fusion of regression outputs is always the median.
      if (task == Task::kRegression &&
          (rule == FusionRule::kLateProduct || rule == FusionRule::kLateSum)) {
        continue;
      }
      cells.push_back({join_modalities(mods), std::string(fusion_rule_name(rule)), rule,
                       std::nullopt});
    }
  }
  return cells;
}

struct Unit {
  FeatureScope scope;
  Task task;
  Family family;
  int fold;  // -1: cross-dataset single training
};

struct CellOutcome {
  bool failed = false;
  std::string error;
  int ties = 0;
  std::vector<VideoPrediction> videos;
  std::vector<WindowPrediction> windows;
};

struct UnitContext {
  const RunConfig* config;
  Protocol protocol;
  const PreparedDataset* train;
  const PreparedDataset* test;
  const Labels* train_labels;
  const Labels* test_labels;
  const RunHooks* hooks;
  // Test-video fold for prediction records.
  std::function<int(std::size_t)> test_fold;
};

std::uint64_t model_seed(const RunConfig& c, const Unit& u, const std::string& set) {
  const std::string key = std::string(family_name(u.family)) + '|' + std::string(task_name(u.task)) +
                          '|' + std::string(scope_name(u.scope)) + '|' + set + '|' +
                          std::to_string(u.fold);
  return util::mix_seed(c.model_seed, util::fnv1a64(key));
}

struct RowOutputs {
  std::vector<ClassProbs> probs;
  std::vector<double> values;
};

double clamp_score(double v) { return std::clamp(v, 1.0, 4.0); }

std::vector<CellOutcome> run_unit(const UnitContext& ctx, const Unit& u,
                                  std::span<const std::size_t> train_videos,
                                  std::span<const std::size_t> test_videos,
                                  const std::vector<CellPlan>& cells) {
  const RunConfig& config = *ctx.config;
  const auto mods = canonical(config.modalities);
  const bool cls = u.task == Task::kClassification;

  // One model per feature set, trained on demand; a failure is remembered so
  // that every cell depending on it reports it.
  std::map<std::string, std::variant<RowOutputs, std::string>> outputs;
  std::optional<Rows> test_rows_cache;
  const auto test_rows_info = [&]() -> const Rows& {
    if (!test_rows_cache) {
      test_rows_cache = build_rows(*ctx.test, test_videos, std::span<const Modality>(mods.data(), 1),
                                   u.scope);
    }
    return *test_rows_cache;
  };
  const auto predict_set = [&](const std::vector<Modality>& set_mods) -> const auto& {
    const std::string name = join_modalities(set_mods);
    auto it = outputs.find(name);
    if (it != outputs.end()) return it->second;
    std::variant<RowOutputs, std::string> result;
    try {
      const Rows tr = build_rows(*ctx.train, train_videos, set_mods, u.scope);
      std::vector<double> y(tr.video.size());
      for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = cls ? static_cast<double>((*ctx.train_labels).cls[tr.video[i]])
                   : (*ctx.train_labels).score[tr.video[i]];
      }
      if (ctx.hooks->on_train) {
        TrainEvent ev{ctx.protocol, u.scope, u.task, u.family, name, u.fold, tr.video.size()};
        ctx.hooks->on_train(ev);
      }
      ModelSpec spec{u.family, u.task, config.hp, model_seed(config, u, name)};
      const TrainedModel model = train(spec, tr.x, y);
      const Rows te = build_rows(*ctx.test, test_videos, set_mods, u.scope);
      RowOutputs o;
      if (te.x.rows() > 0) {
        if (cls) o.probs = model.predict_proba(te.x);
        else o.values = model.predict_value(te.x);
      }
      result = std::move(o);
    } catch (const Error& e) {
      result = std::string(e.what());
    }
    return outputs.emplace(name, std::move(result)).first->second;
  };

  std::vector<CellOutcome> out(cells.size());
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const CellPlan& cell = cells[ci];
    CellOutcome& oc = out[ci];
    CellKey key{ctx.protocol, u.scope, u.task, cell.modalities, u.family, cell.fusion};

    // Per-row class probabilities or values for this cell.
    std::vector<ClassProbs> probs;
    std::vector<double> values;
    std::vector<CompetenceClass> row_class;
    try {
      if (cell.single || cell.rule == FusionRule::kFeature) {
        const auto set = cell.single ? std::vector<Modality>{*cell.single} : mods;
        const auto& r = predict_set(set);
        if (const auto* err = std::get_if<std::string>(&r)) throw InputError(*err);
        const auto& o = std::get<RowOutputs>(r);
        probs = o.probs;
        values = o.values;
        for (const auto& p : probs) {
          row_class.push_back(p[1] > p[0] ? CompetenceClass::kHigh : CompetenceClass::kLow);
        }
      } else {
        std::vector<const RowOutputs*> parts;
        for (Modality m : mods) {
          const auto& r = predict_set({m});
          if (const auto* err = std::get_if<std::string>(&r)) {
            throw InputError(std::string(modality_name(m)) + " model: " + *err);
          }
          parts.push_back(&std::get<RowOutputs>(r));
        }
        const std::size_t n = cls ? parts[0]->probs.size() : parts[0]->values.size();
        for (std::size_t i = 0; i < n; ++i) {
          if (cls) {
            std::vector<std::vector<double>> per_mod;
            for (const auto* p : parts) per_mod.push_back({p->probs[i][0], p->probs[i][1]});
            const FusedDecision d = late_fuse_class(per_mod, *cell.rule);
            if (d.tie) ++oc.ties;
            probs.push_back({d.normalized[0], d.normalized[1]});
            row_class.push_back(static_cast<CompetenceClass>(d.argmax));
          } else {
            std::vector<double> vals;
            for (const auto* p : parts) vals.push_back(p->values[i]);
            values.push_back(late_fuse_reg(vals));
          }
        }
      }
    } catch (const Error& e) {
      oc.failed = true;
      oc.error = e.what();
      continue;
    }

    // Aggregate rows to videos.
    const Rows& rows = test_rows_info();
    std::map<std::size_t, std::vector<std::size_t>> by_video;
    for (std::size_t i = 0; i < rows.video.size(); ++i) by_video[rows.video[i]].push_back(i);
    for (std::size_t vi : test_videos) {
      auto it = by_video.find(vi);
      if (it == by_video.end()) continue;
      const auto& idx = it->second;
      VideoPrediction vp;
      vp.key = key;
      vp.fold = ctx.test_fold(vi);
      vp.video_id = ctx.test->videos[vi].video_id;
      vp.true_score = ctx.test_labels->score[vi];
      vp.windows = idx.size();
      if (cls) {
        vp.true_class = ctx.test_labels->cls[vi];
        std::vector<CompetenceClass> wc;
        std::vector<ClassProbs> wp;
        double ph = 0.0;
        for (std::size_t i : idx) {
          wc.push_back(row_class[i]);
          wp.push_back(probs[i]);
          ph += probs[i][1];
        }
        vp.predicted_class = idx.size() == 1 ? wc[0] : video_vote(wc, wp);
        vp.prob_high = ph / static_cast<double>(idx.size());
      } else {
        std::vector<double> wv;
        for (std::size_t i : idx) wv.push_back(clamp_score(values[i]));
        vp.predicted_value = video_median(wv);
      }
      if (u.scope == FeatureScope::kLocal) {
        for (std::size_t i : idx) {
          WindowPrediction wp;
          wp.key = key;
          wp.fold = vp.fold;
          wp.video_id = vp.video_id;
          wp.window = *rows.window[i];
          if (cls) {
            wp.predicted_class = row_class[i];
            wp.prob_high = probs[i][1];
          } else {
            wp.predicted_value = clamp_score(values[i]);
          }
          oc.windows.push_back(std::move(wp));
        }
      }
      oc.videos.push_back(std::move(vp));
    }
  }
  return out;
}

// Runs `fn(i)` for i in [0, n) on up to `workers` threads and rethrows the
// first exception.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t threads =
      std::min<std::size_t>(n, workers > 0 ? static_cast<std::size_t>(workers) : hw);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

double resolve_threshold(const RunConfig& config, std::vector<double> pooled,
                         std::vector<std::string>& notes) {
  if (config.threshold_mode == ThresholdMode::kFixed) {
    notes.push_back("threshold fixed at " + util::format_double(config.threshold));
    return config.threshold;
  }
  const double t = compute_median_threshold(pooled);
  notes.push_back("threshold recomputed as pooled median " + util::format_double(t) + " over " +
                  std::to_string(pooled.size()) + " videos");
  return t;
}

void fill_metrics(ResultRow& row, const CellOutcome& oc, int k, std::vector<std::string>& notes) {
  std::map<int, std::vector<const VideoPrediction*>> by_fold;
  for (const auto& vp : oc.videos) by_fold[vp.fold].push_back(&vp);
  for (int f = 0; f < k; ++f) {
    auto it = by_fold.find(f);
    if (it == by_fold.end()) {
      notes.push_back("fold " + std::to_string(f) + " has no predictions for a cell");
      continue;
    }
    FoldMetrics fm;
    fm.fold = f;
    if (row.key.task == Task::kClassification) {
      std::vector<CompetenceClass> t, p;
      for (const auto* vp : it->second) {
        t.push_back(*vp->true_class);
        p.push_back(*vp->predicted_class);
      }
      const auto m = classification_metrics(t, p);
      fm.accuracy = m.accuracy;
      fm.precision = m.precision;
      fm.recall = m.recall;
      fm.f1 = m.f1;
      if (!m.precision) ++row.undefined_precision_folds;
    } else {
      std::vector<double> t, p;
      for (const auto* vp : it->second) {
        t.push_back(vp->true_score);
        p.push_back(*vp->predicted_value);
      }
      fm.mse = mse(t, p);
    }
    row.folds.push_back(fm);
  }
  if (row.key.task == Task::kRegression && oc.videos.size() >= 2) {
    std::vector<double> t, p;
    for (const auto& vp : oc.videos) {
      t.push_back(vp.true_score);
      p.push_back(*vp.predicted_value);
    }
    try {
      row.pearson_r = pearson_r(t, p);
    } catch (const DomainError&) {
      // Constant predictions leave r undefined.
    }
  }
}

struct Grid {
  std::vector<Unit> units;
  std::vector<std::vector<CellPlan>> cells;  // per unit
};

Grid make_grid(const RunConfig& config, int folds) {
  Grid g;
  for (FeatureScope scope : config.scopes) {
    for (Task task : config.tasks) {
      for (Family family : config.families) {
        for (int f = 0; f < std::max(folds, 1); ++f) {
          g.units.push_back({scope, task, family, folds > 0 ? f : -1});
          g.cells.push_back(plan_cells(config, task));
        }
      }
    }
  }
  return g;
}

void check_selected_modalities(const RunConfig& config, const PreparedDataset& d) {
  for (const auto& v : d.videos) {
    for (Modality m : config.modalities) {
      if (!v.features.count(m)) {
        throw InputError("dataset was prepared without the " + std::string(modality_name(m)) +
                         " modality");
      }
    }
  }
}

// Collects unit outcomes into rows in grid order.
void assemble(const Grid& grid, const std::vector<std::vector<CellOutcome>>& results,
              Protocol protocol, int k, RunOutput& out) {
  std::map<CellKey, std::size_t> index;
  std::map<CellKey, CellOutcome> merged;
  for (std::size_t ui = 0; ui < grid.units.size(); ++ui) {
    const Unit& u = grid.units[ui];
    for (std::size_t ci = 0; ci < grid.cells[ui].size(); ++ci) {
      const CellPlan& c = grid.cells[ui][ci];
      CellKey key{protocol, u.scope, u.task, c.modalities, u.family, c.fusion};
      if (!index.count(key)) {
        index[key] = out.table.rows.size();
        out.table.rows.push_back({});
        out.table.rows.back().key = key;
      }
      const CellOutcome& oc = results[ui][ci];
      CellOutcome& m = merged[key];
      if (oc.failed && !m.failed) {
        m.failed = true;
        m.error = u.fold >= 0 ? "fold " + std::to_string(u.fold) + ": " + oc.error : oc.error;
      }
      m.ties += oc.ties;
      m.videos.insert(m.videos.end(), oc.videos.begin(), oc.videos.end());
      m.windows.insert(m.windows.end(), oc.windows.begin(), oc.windows.end());
    }
  }
  for (auto& row : out.table.rows) {
    CellOutcome& oc = merged[row.key];
    row.fusion_ties = oc.ties;
    if (oc.failed) {
      row.failed = true;
      row.error = oc.error;
      continue;
    }
    std::vector<std::string> notes;
    fill_metrics(row, oc, k, notes);
    for (auto& n : notes) out.notes.push_back(n);
    out.videos.insert(out.videos.end(), oc.videos.begin(), oc.videos.end());
    out.windows.insert(out.windows.end(), oc.windows.begin(), oc.windows.end());
  }
}

std::vector<std::string> sample_ids(const PreparedDataset& d, std::span<const std::size_t> videos,
                                    FeatureScope scope) {
  std::vector<std::string> ids;
  for (std::size_t vi : videos) {
    const auto& v = d.videos[vi];
    const std::size_t reps = scope == FeatureScope::kGlobal ? 1 : v.common_windows.size();
    for (std::size_t r = 0; r < reps; ++r) ids.push_back(v.video_id);
  }
  return ids;
}

void note_missing_windows(const RunConfig& config, const PreparedDataset& d, std::string_view tag,
                          std::vector<std::string>& notes) {
  if (std::find(config.scopes.begin(), config.scopes.end(), FeatureScope::kLocal) ==
      config.scopes.end()) {
    return;
  }
  for (const auto& v : d.videos) {
    if (v.common_windows.empty()) {
      notes.push_back(std::string(tag) + " video " + v.video_id +
                      " has no window shared by all modalities; left out of local cells");
    }
  }
}

}  // namespace

RunOutput run_same_dataset(const RunConfig& config, const PreparedDataset& data,
                           const RunHooks& hooks) {
  validate_config(config);
  check_selected_modalities(config, data);
  RunOutput out;
  out.table.fingerprint = config_fingerprint(config);
  std::vector<double> pooled;
  for (const auto& v : data.videos) pooled.push_back(v.score);
  out.threshold = resolve_threshold(config, pooled, out.notes);
  const Labels labels = label_dataset(data, out.threshold);
  note_missing_windows(config, data, "train", out.notes);

  std::vector<FoldInput> inputs;
  for (std::size_t i = 0; i < data.videos.size(); ++i) {
    inputs.push_back({data.videos[i].video_id, data.videos[i].person_id, labels.cls[i]});
  }
  out.plan = make_folds(inputs, config.k, config.fold_seed);
  std::vector<int> fold_of(data.videos.size());
  std::vector<std::vector<std::size_t>> train_idx(static_cast<std::size_t>(config.k));
  std::vector<std::vector<std::size_t>> test_idx(static_cast<std::size_t>(config.k));
  for (std::size_t i = 0; i < data.videos.size(); ++i) {
    fold_of[i] = out.plan.fold_of(data.videos[i].video_id);
    for (int f = 0; f < config.k; ++f) {
      (f == fold_of[i] ? test_idx : train_idx)[static_cast<std::size_t>(f)].push_back(i);
    }
  }
  if (hooks.on_fold) {
    for (FeatureScope scope : config.scopes) {
      for (int f = 0; f < config.k; ++f) {
        FoldEvent ev;
        ev.protocol = Protocol::kSameDataset;
        ev.scope = scope;
        ev.fold = f;
        ev.train_samples = sample_ids(data, train_idx[static_cast<std::size_t>(f)], scope);
        ev.test_samples = sample_ids(data, test_idx[static_cast<std::size_t>(f)], scope);
        hooks.on_fold(ev);
      }
    }
  }

  UnitContext ctx{&config, Protocol::kSameDataset, &data, &data, &labels, &labels, &hooks,
                  [&](std::size_t vi) { return fold_of[vi]; }};
  const Grid grid = make_grid(config, config.k);
  std::vector<std::vector<CellOutcome>> results(grid.units.size());
  parallel_for(grid.units.size(), config.workers, [&](std::size_t ui) {
    const Unit& u = grid.units[ui];
    const auto f = static_cast<std::size_t>(u.fold);
    results[ui] = run_unit(ctx, u, train_idx[f], test_idx[f], grid.cells[ui]);
  });
  assemble(grid, results, Protocol::kSameDataset, config.k, out);
  return out;
}

RunOutput run_cross_dataset(const RunConfig& config, const PreparedDataset& train,
                            const PreparedDataset& test, const RunHooks& hooks) {
  validate_config(config);
  check_selected_modalities(config, train);
  check_selected_modalities(config, test);
  RunOutput out;
  out.table.fingerprint = config_fingerprint(config);

  std::set<std::string> train_ids, test_ids, train_persons;
  for (const auto& v : train.videos) {
    train_ids.insert(v.video_id);
    train_persons.insert(v.person_id);
  }
  std::size_t shared = 0, shared_persons = 0;
  std::set<std::string> counted;
  for (const auto& v : test.videos) {
    test_ids.insert(v.video_id);
    shared += train_ids.count(v.video_id);
    if (train_persons.count(v.person_id) && counted.insert(v.person_id).second) ++shared_persons;
  }
  if (shared > 0 && train_ids != test_ids) {
    throw InputError("train and test datasets share " + std::to_string(shared) +
                     " video ids but are not identical");
  }
  if (shared > 0) out.notes.push_back("degenerate overlap: train and test hold the same videos");
  out.notes.push_back(std::to_string(shared_persons) + " test persons also appear in training");

  std::vector<double> pooled;
  for (const auto& v : train.videos) pooled.push_back(v.score);
  if (shared == 0) {
    for (const auto& v : test.videos) pooled.push_back(v.score);
  }
  out.threshold = resolve_threshold(config, pooled, out.notes);
  const Labels train_labels = label_dataset(train, out.threshold);
  const Labels test_labels = label_dataset(test, out.threshold);
  note_missing_windows(config, train, "train", out.notes);
  note_missing_windows(config, test, "test", out.notes);

  std::vector<std::string> ids;
  for (const auto& v : test.videos) ids.push_back(v.video_id);
  out.plan = make_shuffle_folds(ids, config.k, config.fold_seed);
  std::vector<int> fold_of(test.videos.size());
  for (std::size_t i = 0; i < test.videos.size(); ++i) fold_of[i] = out.plan.fold_of(ids[i]);

  std::vector<std::size_t> train_idx(train.videos.size()), test_idx(test.videos.size());
  for (std::size_t i = 0; i < train_idx.size(); ++i) train_idx[i] = i;
  for (std::size_t i = 0; i < test_idx.size(); ++i) test_idx[i] = i;
  if (hooks.on_fold) {
    for (FeatureScope scope : config.scopes) {
      for (int f = 0; f < config.k; ++f) {
        FoldEvent ev;
        ev.protocol = Protocol::kCrossDataset;
        ev.scope = scope;
        ev.fold = f;
        ev.train_samples = sample_ids(train, train_idx, scope);
        std::vector<std::size_t> members;
        for (std::size_t i : test_idx) {
          if (fold_of[i] == f) members.push_back(i);
        }
        ev.test_samples = sample_ids(test, members, scope);
        hooks.on_fold(ev);
      }
    }
  }

  UnitContext ctx{&config, Protocol::kCrossDataset, &train, &test, &train_labels, &test_labels,
                  &hooks, [&](std::size_t vi) { return fold_of[vi]; }};
  const Grid grid = make_grid(config, 0);
  std::vector<std::vector<CellOutcome>> results(grid.units.size());
  parallel_for(grid.units.size(), config.workers, [&](std::size_t ui) {
    results[ui] = run_unit(ctx, grid.units[ui], train_idx, test_idx, grid.cells[ui]);
  });
  assemble(grid, results, Protocol::kCrossDataset, config.k, out);
  return out;
}

// ---------------------------------------------------------------------------
// Prediction dumps

namespace {

std::string key_prefix(const CellKey& k) {
  return std::string(protocol_name(k.protocol)) + ',' + std::string(scope_name(k.scope)) + ',' +
         std::string(task_name(k.task)) + ',' + k.modalities + ',' +
         std::string(family_name(k.family)) + ',' + k.fusion;
}

std::string opt_num(const std::optional<double>& v) {
  return v ? util::format_double(*v) : std::string();
}

std::string opt_class(const std::optional<CompetenceClass>& c) {
  return c ? std::string(class_name(*c)) : std::string();
}

}  // namespace

void write_video_predictions_csv(std::span<const VideoPrediction> rows,
                                 std::string_view fingerprint, const std::filesystem::path& path) {
  std::string out =
      "fingerprint,protocol,scope,task,modalities,family,fusion,fold,video_id,true_score,true_class,"
      "predicted_class,prob_high,predicted_value,windows\n";
  for (const auto& r : rows) {
    out += std::string(fingerprint) + ',' + key_prefix(r.key) + ',' + std::to_string(r.fold) + ',' + r.video_id + ',' +
           util::format_double(r.true_score) + ',' + opt_class(r.true_class) + ',' +
           opt_class(r.predicted_class) + ',' + opt_num(r.prob_high) + ',' +
           opt_num(r.predicted_value) + ',' + std::to_string(r.windows) + '\n';
  }
  util::write_text_file(path, out);
}

void write_window_predictions_csv(std::span<const WindowPrediction> rows,
                                  std::string_view fingerprint, const std::filesystem::path& path) {
  std::string out =
      "fingerprint,protocol,scope,task,modalities,family,fusion,fold,video_id,window_index,start_s,end_s,"
      "predicted_class,prob_high,predicted_value\n";
  for (const auto& r : rows) {
    out += std::string(fingerprint) + ',' + key_prefix(r.key) + ',' + std::to_string(r.fold) + ',' + r.video_id + ',' +
           std::to_string(r.window.index) + ',' + util::format_double(r.window.start_s) + ',' +
           util::format_double(r.window.end_s) + ',' + opt_class(r.predicted_class) + ',' +
           opt_num(r.prob_high) + ',' + opt_num(r.predicted_value) + '\n';
  }
  util::write_text_file(path, out);
}

}  // namespace pcomp
