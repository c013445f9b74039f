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
#include <map>
#include <mutex>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "pcomp/error.hpp"
#include "pcomp/eval.hpp"
#include "pcomp/synth.hpp"
#include "test_helpers.hpp"

namespace pcomp {
namespace {

using C = CompetenceClass;

TEST(MakeFolds, BalancedSizesAndClasses) {
  std::vector<FoldInput> in;
  for (int i = 0; i < 160; ++i) {
    in.push_back({"v" + std::to_string(i), "p" + std::to_string(i), i % 2 ? C::kHigh : C::kLow});
  }
  const FoldPlan plan = make_folds(in, 10, 42);
  for (int f = 0; f < 10; ++f) {
    const auto m = plan.members(f);
    EXPECT_EQ(m.size(), 16u);
    int high = 0;
    for (const auto& id : m) high += std::stoi(id.substr(1)) % 2;
    EXPECT_NEAR(high, 8, 1);
  }
}

TEST(MakeFolds, PersonsStayTogether) {
  std::vector<FoldInput> in;
  for (int i = 0; i < 60; ++i) {
    in.push_back({"v" + std::to_string(i), "p" + std::to_string(i / 3), i % 5 < 2 ? C::kHigh : C::kLow});
  }
  in.push_back({"extra", "p7", C::kHigh});
  const FoldPlan plan = make_folds(in, 5, 9);
  std::map<std::string, std::set<int>> folds_of_person;
  for (const auto& v : in) folds_of_person[v.person_id].insert(plan.fold_of(v.video_id));
  for (const auto& [p, f] : folds_of_person) EXPECT_EQ(f.size(), 1u) << p;
  EXPECT_EQ(plan.fold_of("extra"), plan.fold_of("v21"));
}

TEST(MakeFolds, DeterministicPerSeedAndValidated) {
  std::vector<FoldInput> in;
  for (int i = 0; i < 40; ++i) in.push_back({"v" + std::to_string(i), "p" + std::to_string(i), C::kLow});
  EXPECT_EQ(make_folds(in, 4, 1).assignment(), make_folds(in, 4, 1).assignment());
  EXPECT_NE(make_folds(in, 4, 1).assignment(), make_folds(in, 4, 2).assignment());
  EXPECT_THROW(make_folds(in, 1, 1), InputError);
  EXPECT_THROW(make_folds(std::span(in).first(3), 4, 1), InputError);
  EXPECT_THROW(make_folds(in, 4, 1).fold_of("nope"), InputError);
}

TEST(MakeShuffleFolds, NearEqualSizes) {
  std::vector<std::string> ids;
  for (int i = 0; i < 91; ++i) ids.push_back("t" + std::to_string(i));
  const FoldPlan plan = make_shuffle_folds(ids, 10, 3);
  for (int f = 0; f < 10; ++f) {
    const auto n = plan.members(f).size();
    EXPECT_TRUE(n == 9 || n == 10);
  }
  EXPECT_EQ(plan.assignment(), make_shuffle_folds(ids, 10, 3).assignment());
}

TEST(VideoVote, MajorityAndTieBreaks) {
  EXPECT_EQ(video_vote(std::vector{C::kHigh, C::kHigh, C::kLow}), C::kHigh);
  const std::vector<ClassProbs> probs{{0.2, 0.8}, {0.4, 0.6}};
  EXPECT_EQ(video_vote(std::vector{C::kHigh, C::kLow}, probs), C::kHigh);
  EXPECT_EQ(video_vote(std::vector{C::kHigh, C::kLow}), C::kLow);
  EXPECT_EQ(video_vote(std::vector{C::kHigh}), C::kHigh);
  EXPECT_THROW(video_vote(std::vector<C>{}), InputError);
}

TEST(VideoMedian, Examples) {
  EXPECT_DOUBLE_EQ(video_median(std::vector{2.0, 2.5, 3.5}), 2.5);
  EXPECT_DOUBLE_EQ(video_median(std::vector{2.0, 3.0}), 2.5);
  EXPECT_DOUBLE_EQ(video_median(std::vector{3.1, 3.1}), 3.1);
}

std::vector<C> classes(std::initializer_list<int> v) {
  std::vector<C> out;
  for (int x : v) out.push_back(x ? C::kHigh : C::kLow);
  return out;
}

TEST(ClassificationMetrics, ConfusionExample) {
  // TP=3, TN=2, FP=1, FN=2.
  const auto truth = classes({1, 1, 1, 0, 0, 0, 1, 1});
  const auto pred = classes({1, 1, 1, 0, 0, 1, 0, 0});
  const ClassificationMetrics m = classification_metrics(truth, pred);
  EXPECT_EQ(m.tp, 3u);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.625);
  EXPECT_DOUBLE_EQ(*m.precision, 0.75);
  EXPECT_DOUBLE_EQ(*m.recall, 0.6);
  EXPECT_NEAR(m.f1, 0.6667, 1e-4);
}

TEST(ClassificationMetrics, PerfectAndDegenerate) {
  const auto t = classes({1, 0, 1});
  const ClassificationMetrics p = classification_metrics(t, t);
  EXPECT_EQ(p.accuracy, 1.0);
  EXPECT_EQ(*p.precision, 1.0);
  EXPECT_EQ(p.f1, 1.0);
  const ClassificationMetrics d = classification_metrics(t, classes({0, 0, 0}));
  EXPECT_FALSE(d.precision.has_value());
  EXPECT_EQ(*d.recall, 0.0);
  EXPECT_EQ(d.f1, 0.0);
  EXPECT_THROW(classification_metrics(t, classes({0})), InputError);
}

TEST(ClassificationMetrics, MatchesBruteForceOracle) {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + trial % 30;
    std::vector<C> t(n), p(n);
    int tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = coin(rng) ? C::kHigh : C::kLow;
      p[i] = coin(rng) ? C::kHigh : C::kLow;
      if (t[i] == C::kHigh) (p[i] == C::kHigh ? tp : fn)++;
      else (p[i] == C::kHigh ? fp : tn)++;
    }
    const ClassificationMetrics m = classification_metrics(t, p);
    EXPECT_EQ(m.accuracy, static_cast<double>(tp + tn) / static_cast<double>(n));
    if (tp + fp > 0 && tp + fn > 0 && tp > 0) {
      const double pr = static_cast<double>(tp) / (tp + fp), rc = static_cast<double>(tp) / (tp + fn);
      EXPECT_NEAR(m.f1, 2 * pr * rc / (pr + rc), 1e-12);
    } else {
      EXPECT_EQ(m.f1, 0.0);
    }
  }
}

TEST(Mse, Examples) {
  EXPECT_EQ(mse(std::vector{1.0, 2.0}, std::vector{1.0, 2.0}), 0.0);
  EXPECT_DOUBLE_EQ(mse(std::vector{1.0, 2.0}, std::vector{2.0, 4.0}), 2.5);
  EXPECT_NEAR(mse(std::vector{1.0, 2.0, 3.0}, std::vector{1.3, 2.3, 3.3}), 0.09, 1e-12);
  EXPECT_THROW(mse(std::vector{1.0}, std::vector{1.0, 2.0}), InputError);
}

TEST(Pearson, Examples) {
  EXPECT_NEAR(pearson_r(std::vector{1.0, 2.0, 3.0}, std::vector{1.0, 2.0, 3.0}), 1.0, 1e-12);
  EXPECT_NEAR(pearson_r(std::vector{1.0, 2.0, 3.0}, std::vector{3.0, 2.0, 1.0}), -1.0, 1e-12);
  EXPECT_NEAR(pearson_r(std::vector{1.0, 2.0, 3.0, 4.0}, std::vector{1.0, 2.0, 3.0, 10.0}), 0.8854, 1e-4);
  EXPECT_THROW(pearson_r(std::vector{1.0, 1.0}, std::vector{1.0, 2.0}), DomainError);
}

TEST(Pearson, AffineMaps) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(20), y(20);
    const double a = g(rng) * 3, b = g(rng);
    for (int i = 0; i < 20; ++i) {
      x[i] = g(rng);
      y[i] = a * x[i] + b;
    }
    EXPECT_NEAR(pearson_r(x, y), a > 0 ? 1.0 : -1.0, 1e-9);
  }
}

ResultTable sample_table() {
  ResultTable t;
  t.fingerprint = "00112233aabbccdd";
  ResultRow c;
  c.key.modalities = "face";
  c.key.family = Family::kRF;
  c.folds = {{0, 0.5, 0.4, 0.25, 1.0 / 3, {}}, {1, 0.75, {}, 0.0, 0.0, {}}};
  c.undefined_precision_folds = 1;
  t.rows.push_back(c);
  ResultRow r;
  r.key.task = Task::kRegression;
  r.key.scope = FeatureScope::kLocal;
  r.key.modalities = "speech+face+pose";
  r.key.fusion = "LF_median";
  r.folds = {{0, {}, {}, {}, {}, 0.123456789}, {1, {}, {}, {}, {}, 0.2}};
  r.pearson_r = 0.61;
  t.rows.push_back(r);
  ResultRow f;
  f.key.protocol = Protocol::kCrossDataset;
  f.key.modalities = "pose";
  f.key.family = Family::kSVM;
  f.failed = true;
  f.error = "solver blew up";
  t.rows.push_back(f);
  return t;
}

TEST(ResultTable, SummaryIsRecomputableFromFolds) {
  const ResultTable t = sample_table();
  const auto acc = summarize(t.rows[0], &FoldMetrics::accuracy);
  ASSERT_TRUE(acc);
  EXPECT_DOUBLE_EQ(acc->mean, 0.625);
  EXPECT_DOUBLE_EQ(acc->std, 0.125);
  const auto prec = summarize(t.rows[0], &FoldMetrics::precision);
  EXPECT_EQ(prec->n, 1u);
  EXPECT_FALSE(summarize(t.rows[0], &FoldMetrics::mse));
}

TEST(ResultTable, FoldsCsvRoundTrip) {
  testing::TempDir dir;
  const ResultTable t = sample_table();
  write_folds_csv(t, dir / "folds.csv");
  const ResultTable back = read_folds_csv(dir / "folds.csv");
  EXPECT_EQ(back.fingerprint, t.fingerprint);
  ASSERT_EQ(back.rows.size(), 3u);
  const ResultRow* reg = back.find(t.rows[1].key);
  ASSERT_NE(reg, nullptr);
  EXPECT_EQ(*reg->folds[0].mse, 0.123456789);
  EXPECT_EQ(*reg->pearson_r, 0.61);
  const ResultRow* cls = back.find(t.rows[0].key);
  EXPECT_EQ(cls->undefined_precision_folds, 1);
  EXPECT_EQ(*cls->folds[0].f1, 1.0 / 3);
  const ResultRow* failed = back.find(t.rows[2].key);
  EXPECT_TRUE(failed->failed);
  EXPECT_EQ(failed->error, "solver blew up");
  write_folds_csv(back, dir / "again.csv");
  EXPECT_EQ(testing::read_file(dir / "folds.csv"), testing::read_file(dir / "again.csv"));
}

TEST(ResultTable, MarkdownMentionsEveryCell) {
  const std::string md = render_markdown(sample_table());
  EXPECT_NE(md.find("RF"), std::string::npos);
  EXPECT_NE(md.find("LF_median"), std::string::npos);
  EXPECT_NE(md.find("solver blew up"), std::string::npos);
}

// A small generated dataset shared by the protocol tests: 24 videos from 12
// persons, 40-56 s each.
class Protocols : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = std::filesystem::temp_directory_path() / "pcomp_test_protocols";
    std::filesystem::remove_all(root_);
    synth::SynthSpec s;
    s.n_videos = 24;
    s.n_persons = 12;
    s.duration_min_s = 40;
    s.duration_max_s = 56;
    s.seed = 31;
    synth::PairSpec pair;
    pair.n_persons = 6;
    pair.seed = 32;
    const auto g = synth::generate_pair(s, pair, root_);
    config_ = RunConfig{};
    config_.train_manifest = g.first.manifest_path;
    config_.k = 4;
    config_.hp.n_estimators = 10;
    config_.workers = 2;
    config_.families = {Family::kDT, Family::kGB};
    data_ = new PreparedDataset(prepare_dataset(g.first.manifest_path, std::nullopt, config_));
    second_ = new PreparedDataset(prepare_dataset(g.second.manifest_path, std::nullopt, config_));
  }
  static void TearDownTestSuite() {
    delete data_;
    delete second_;
    std::filesystem::remove_all(root_);
  }
  static inline std::filesystem::path root_;
  static inline RunConfig config_;
  static inline PreparedDataset* data_ = nullptr;
  static inline PreparedDataset* second_ = nullptr;
};

TEST_F(Protocols, PreparedDatasetHasEveryModality) {
  ASSERT_EQ(data_->videos.size(), 24u);
  for (const auto& v : data_->videos) {
    EXPECT_EQ(v.features.size(), 3u);
    EXPECT_GE(v.common_windows.size(), 2u);
    EXPECT_GE(v.score, 1.0);
    EXPECT_LE(v.score, 4.0);
  }
}

TEST_F(Protocols, SameDatasetFoldsArePersonIndependent) {
  std::map<std::string, std::string> person;
  for (const auto& v : data_->videos) person[v.video_id] = v.person_id;
  std::mutex mu;
  std::vector<FoldEvent> events;
  std::map<std::string, int> trains;
  RunHooks hooks;
  hooks.on_fold = [&](const FoldEvent& e) {
    std::lock_guard lock(mu);
    events.push_back(e);
  };
  hooks.on_train = [&](const TrainEvent& e) {
    std::lock_guard lock(mu);
    ++trains[std::string(scope_name(e.scope)) + "/" + std::string(task_name(e.task)) + "/" +
             std::string(family_name(e.family)) + "/" + e.feature_set];
  };
  const RunOutput out = run_same_dataset(config_, *data_, hooks);
  ASSERT_EQ(events.size(), 8u);
  for (const auto& e : events) {
    std::set<std::string> train_persons, test_videos;
    for (const auto& id : e.train_samples) train_persons.insert(person.at(id));
    for (const auto& id : e.test_samples) {
      EXPECT_EQ(train_persons.count(person.at(id)), 0u);
      EXPECT_EQ(out.plan.fold_of(id), e.fold);
      test_videos.insert(id);
    }
    for (const auto& id : e.train_samples) EXPECT_EQ(test_videos.count(id), 0u);
  }
  for (const auto& [cell, n] : trains) EXPECT_EQ(n, 4) << cell;
  for (const auto& row : out.table.rows) EXPECT_FALSE(row.failed) << row.error;
}

TEST_F(Protocols, GridHasExpectedCells) {
  RunConfig c = config_;
  c.scopes = {FeatureScope::kGlobal};
  c.tasks = {Task::kClassification};
  const RunOutput out = run_same_dataset(c, *data_);
  // 2 families x (3 single modalities + FF + 3 late rules).
  EXPECT_EQ(out.table.rows.size(), 14u);
  for (const auto& row : out.table.rows) EXPECT_EQ(row.folds.size(), 4u);
  EXPECT_EQ(out.videos.size(), 14u * 24u);
}

TEST_F(Protocols, RegressionUsesOnlyTheMedianRule) {
  RunConfig c = config_;
  c.scopes = {FeatureScope::kLocal};
  c.tasks = {Task::kRegression};
  c.families = {Family::kDT};
  const RunOutput out = run_same_dataset(c, *data_);
  EXPECT_EQ(out.table.rows.size(), 5u);
  for (const auto& row : out.table.rows) {
    EXPECT_TRUE(row.key.fusion == "none" || row.key.fusion == "FF" || row.key.fusion == "LF_median");
    EXPECT_TRUE(row.pearson_r.has_value());
  }
  for (const auto& v : out.videos) {
    EXPECT_GE(*v.predicted_value, 1.0);
    EXPECT_LE(*v.predicted_value, 4.0);
  }
  EXPECT_FALSE(out.windows.empty());
}

TEST_F(Protocols, CrossDatasetTrainsOncePerCell) {
  RunConfig c = config_;
  c.test_manifest = second_->manifest.source;
  c.scopes = {FeatureScope::kGlobal};
  std::mutex mu;
  int trains = 0;
  RunHooks hooks;
  hooks.on_train = [&](const TrainEvent& e) {
    std::lock_guard lock(mu);
    EXPECT_EQ(e.fold, -1);
    EXPECT_EQ(e.samples, 24u);
    ++trains;
  };
  const RunOutput out = run_cross_dataset(c, *data_, *second_, hooks);
  // Per task and family: 3 single sets plus the fused set.
  EXPECT_EQ(trains, 2 * 2 * 4);
  for (const auto& row : out.table.rows) {
    EXPECT_EQ(row.key.protocol, Protocol::kCrossDataset);
    EXPECT_EQ(row.folds.size(), 4u);
  }
  const bool noted = std::any_of(out.notes.begin(), out.notes.end(), [](const std::string& n) {
    return n.find("test persons also appear in training") != std::string::npos;
  });
  EXPECT_TRUE(noted);
}

TEST_F(Protocols, CrossDatasetOverlapRules) {
  RunConfig c = config_;
  c.test_manifest = data_->manifest.source;
  c.scopes = {FeatureScope::kGlobal};
  c.tasks = {Task::kClassification};
  c.families = {Family::kDT};
  const RunOutput same = run_cross_dataset(c, *data_, *data_);
  const bool degenerate = std::any_of(same.notes.begin(), same.notes.end(), [](const std::string& n) {
    return n.find("degenerate overlap") != std::string::npos;
  });
  EXPECT_TRUE(degenerate);
  const ResultRow* dt = same.table.find({Protocol::kCrossDataset, FeatureScope::kGlobal,
                                         Task::kClassification, "face", Family::kDT, "none"});
  ASSERT_NE(dt, nullptr);
  EXPECT_GE(summarize(*dt, &FoldMetrics::accuracy)->mean, 0.95);

  PreparedDataset partial = *second_;
  partial.videos.push_back(data_->videos[0]);
  EXPECT_THROW(run_cross_dataset(c, *data_, partial), InputError);
}

TEST_F(Protocols, RunsAreDeterministic) {
  RunConfig c = config_;
  c.tasks = {Task::kClassification};
  c.families = {Family::kGB};
  testing::TempDir dir;
  RunConfig serial = c;
  serial.workers = 1;
  write_folds_csv(run_same_dataset(c, *data_).table, dir / "a.csv");
  write_folds_csv(run_same_dataset(serial, *data_).table, dir / "b.csv");
  EXPECT_EQ(testing::read_file(dir / "a.csv"), testing::read_file(dir / "b.csv"));
}

}  // namespace
}  // namespace pcomp
