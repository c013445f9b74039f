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
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "pcomp/error.hpp"
#include "pcomp/features.hpp"

namespace pcomp {
namespace {

FeatureTable make_table(Modality m, std::size_t rows, double step,
                        const std::function<double(std::size_t, std::size_t)>& value) {
  FeatureTable t;
  t.modality = m;
  t.columns = schema::columns(m);
  t.rows_total = rows;
  for (std::size_t r = 0; r < rows; ++r) {
    t.timestamps.push_back(static_cast<double>(r) * step);
    for (std::size_t c = 0; c < t.columns.size(); ++c) t.values.push_back(value(r, c));
  }
  return t;
}

FeatureVector vec(std::vector<double> v) {
  FeatureVector f;
  f.values = std::move(v);
  return f;
}

TEST(PlanWindows, RemainderBelowHalfIsDropped) {
  const WindowPlan p = plan_windows(0, 180, 16);
  ASSERT_EQ(p.windows.size(), 11u);
  EXPECT_FALSE(p.fallback);
  EXPECT_DOUBLE_EQ(p.windows.back().start_s, 160);
  EXPECT_DOUBLE_EQ(p.windows.back().end_s, 176);
}

TEST(PlanWindows, RemainderOfHalfIsKept) {
  const WindowPlan p = plan_windows(0, 24, 16);
  ASSERT_EQ(p.windows.size(), 2u);
  EXPECT_EQ(p.windows[0], (Window{0, 0, 16}));
  EXPECT_DOUBLE_EQ(p.windows[1].start_s, 16);
  EXPECT_DOUBLE_EQ(p.windows[1].end_s, 24);
}

TEST(PlanWindows, ExactFitAndShortFallback) {
  EXPECT_EQ(plan_windows(0, 16, 16).windows.size(), 1u);
  const WindowPlan shortp = plan_windows(0, 5, 16);
  ASSERT_EQ(shortp.windows.size(), 1u);
  EXPECT_TRUE(shortp.fallback);
  EXPECT_DOUBLE_EQ(shortp.windows[0].end_s, 5);
}

TEST(SegmentWindows, RowsArePartitionedWithoutOverlap) {
  const FeatureTable t = make_table(Modality::kPose, 900, 0.2, [](auto r, auto) { return r; });
  const auto slices = segment_windows(t, 16.0);
  ASSERT_EQ(slices.size(), 11u);
  std::size_t total = 0;
  double prev_end = -1;
  for (const auto& s : slices) {
    total += s.table.rows();
    EXPECT_EQ(s.table.rows(), 80u);
    for (double ts : s.table.timestamps) {
      EXPECT_GE(ts, s.window.start_s);
      EXPECT_LT(ts, s.window.end_s);
      EXPECT_GT(ts, prev_end);
      prev_end = ts;
    }
  }
  EXPECT_EQ(total, 880u);
}

TEST(Aggregate, ConstantColumnHasZeroStd) {
  const FeatureTable t = make_table(Modality::kFace, 7, 0.2, [](auto, auto) { return 5.0; });
  const std::vector<Functional> fs{Functional::kMean, Functional::kStd};
  const FeatureVector v = aggregate(t, fs);
  ASSERT_EQ(v.values.size(), 2 * schema::kFaceColumns);
  EXPECT_EQ(v.values[0], 5.0);
  EXPECT_EQ(v.values[1], 0.0);
}

TEST(Aggregate, PopulationStdAndColumnMajorOrder) {
  const FeatureTable t = make_table(Modality::kPose, 3, 0.2,
                                    [](auto r, auto c) { return c == 0 ? r + 1.0 : 10.0 * c; });
  const std::vector<Functional> fs{Functional::kMean, Functional::kStd};
  const FeatureVector v = aggregate(t, fs);
  EXPECT_DOUBLE_EQ(v.values[0], 2.0);
  EXPECT_NEAR(v.values[1], 0.8165, 1e-4);
  EXPECT_DOUBLE_EQ(v.values[2], 10.0);
  EXPECT_EQ(v.names[0], t.columns[0] + "_mean");
  EXPECT_EQ(v.names[3], t.columns[1] + "_std");
}

TEST(Aggregate, DefaultFunctionalsGiveExpectedLengths) {
  const auto fs = default_functionals();
  const FeatureTable face = make_table(Modality::kFace, 4, 0.2, [](auto r, auto c) { return r * c; });
  const FeatureTable pose = make_table(Modality::kPose, 4, 0.2, [](auto r, auto c) { return r + c; });
  EXPECT_EQ(aggregate(face, fs).values.size(), 172u);
  EXPECT_EQ(aggregate(pose, fs).values.size(), 120u);
}

TEST(Aggregate, SpeechRowPassesThrough) {
  const FeatureTable t = make_table(Modality::kSpeech, 1, 4, [](auto, auto c) { return c * 0.5 - 3; });
  const FeatureVector v = aggregate(t, default_functionals());
  ASSERT_EQ(v.values.size(), 88u);
  for (std::size_t c = 0; c < 88; ++c) EXPECT_EQ(v.values[c], c * 0.5 - 3);
}

TEST(Aggregate, OrderInvariantAndDuplicationInvariant) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  FeatureTable t = make_table(Modality::kPose, 25, 0.2, [&](auto, auto) { return n(rng); });
  const std::vector<Functional> fs{Functional::kMean, Functional::kStd, Functional::kMin,
                                   Functional::kMax,  Functional::kRange, Functional::kMedian};
  const FeatureVector base = aggregate(t, fs);

  FeatureTable rev = t;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    std::copy(t.row(r).begin(), t.row(r).end(), rev.values.begin() + (t.rows() - 1 - r) * t.cols());
  }
  const FeatureVector reversed = aggregate(rev, fs);

  FeatureTable twice = t;
  twice.values.insert(twice.values.end(), t.values.begin(), t.values.end());
  for (std::size_t r = 0; r < t.rows(); ++r) twice.timestamps.push_back(100 + r);
  const FeatureVector doubled = aggregate(twice, fs);

  for (std::size_t i = 0; i < base.values.size(); ++i) {
    EXPECT_NEAR(reversed.values[i], base.values[i], 1e-12);
    EXPECT_NEAR(doubled.values[i], base.values[i], 1e-12);
  }
}

TEST(Aggregate, EmptyTableIsAnError) {
  FeatureTable t;
  t.modality = Modality::kFace;
  t.columns = schema::columns(Modality::kFace);
  EXPECT_THROW(aggregate(t, default_functionals()), InputError);
}

TEST(NormalizePose, NeckIsOriginAndShouldersAreUnitApart) {
  const FeatureTable t = make_table(Modality::kPose, 2, 0.2, [](auto r, auto c) {
    return 100.0 + 7.0 * static_cast<double>(c) * (r + 1) + (c % 2 ? 3.0 : 0.0);
  });
  const FeatureTable n = normalize_pose(t);
  ASSERT_EQ(n.rows(), 2u);
  for (std::size_t r = 0; r < 2; ++r) {
    const auto row = n.row(r);
    EXPECT_NEAR(row[2 * schema::kNeck], 0.0, 1e-12);
    EXPECT_NEAR(row[2 * schema::kNeck + 1], 0.0, 1e-12);
    const double dx = row[2 * schema::kRightShoulder] - row[2 * schema::kLeftShoulder];
    const double dy = row[2 * schema::kRightShoulder + 1] - row[2 * schema::kLeftShoulder + 1];
    EXPECT_NEAR(std::hypot(dx, dy), 1.0, 1e-12);
  }
}

TEST(NormalizePose, InvariantToTranslationAndScale) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 500);
  const FeatureTable t = make_table(Modality::kPose, 5, 0.2, [&](auto, auto) { return u(rng); });
  FeatureTable moved = t;
  for (std::size_t i = 0; i < moved.values.size(); ++i) {
    moved.values[i] = 2.5 * moved.values[i] + (i % 2 ? -40.0 : 75.0);
  }
  const FeatureTable a = normalize_pose(t);
  const FeatureTable b = normalize_pose(moved);
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-9);
}

TEST(NormalizePose, DegenerateShouldersAreDropped) {
  FeatureTable t = make_table(Modality::kPose, 3, 0.2, [](auto r, auto c) { return r == 1 ? 1.0 : c * 1.0; });
  const FeatureTable n = normalize_pose(t);
  EXPECT_EQ(n.rows(), 2u);
  EXPECT_EQ(n.rows_dropped, 1u);
}

TEST(Standardizer, FitsPopulationMomentsAndFlagsConstantDims) {
  const std::vector<FeatureVector> v{vec({0, 10}), vec({2, 10})};
  const Standardizer s = fit_standardizer(v);
  EXPECT_EQ(s.means(), (std::vector<double>{1, 10}));
  EXPECT_EQ(s.stds(), (std::vector<double>{1, 0}));
  EXPECT_EQ(s.constant_dims(), (std::vector<std::size_t>{1}));

  const std::vector<FeatureVector> same(3, vec({4, -1, 7}));
  EXPECT_EQ(fit_standardizer(same).constant_dims().size(), 3u);
}

TEST(Standardizer, TrainingDataBecomesZeroMeanUnitVariance) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(3, 7);
  std::vector<FeatureVector> train;
  for (int i = 0; i < 40; ++i) train.push_back(vec({n(rng), n(rng), 1.5}));
  const Standardizer s = fit_standardizer(train);
  const Matrix z = s.transform(to_matrix(train));
  const Standardizer again = Standardizer::fit(z);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_NEAR(again.means()[j], 0.0, 1e-9);
    EXPECT_NEAR(again.stds()[j], 1.0, 1e-9);
  }
  EXPECT_EQ(again.stds()[2], 0.0);
  EXPECT_EQ(z(0, 2), 0.0);
}

TEST(Standardizer, MeanMapsToZeroAndMeanPlusStdToOne) {
  const std::vector<FeatureVector> v{vec({1, 4}), vec({3, 8}), vec({5, 0})};
  const Standardizer s = fit_standardizer(v);
  for (double x : apply_standardizer(s, vec(s.means())).values) EXPECT_NEAR(x, 0, 1e-12);
  std::vector<double> up(2);
  for (int j = 0; j < 2; ++j) up[j] = s.means()[j] + s.stds()[j];
  for (double x : apply_standardizer(s, vec(up)).values) EXPECT_NEAR(x, 1, 1e-12);
}

TEST(Standardizer, UsesTrainingStatisticsNotTestStatistics) {
  const std::vector<FeatureVector> train{vec({0}), vec({2})};
  const std::vector<FeatureVector> test{vec({10}), vec({14})};
  const Standardizer s = fit_standardizer(train);
  const Standardizer self = fit_standardizer(test);
  EXPECT_DOUBLE_EQ(apply_standardizer(s, test[0]).values[0], 9.0);
  EXPECT_DOUBLE_EQ(apply_standardizer(self, test[0]).values[0], -1.0);
}

TEST(Standardizer, DimensionErrors) {
  const std::vector<FeatureVector> one{vec({1, 2})};
  EXPECT_THROW(fit_standardizer(one), InputError);
  const std::vector<FeatureVector> v{vec({1, 2}), vec({3, 4})};
  EXPECT_THROW(apply_standardizer(fit_standardizer(v), vec({1})), InputError);
}

TEST(ExtractFeatures, WindowsShareTheVideoGrid) {
  const FeatureTable t = make_table(Modality::kFace, 120, 0.2, [](auto r, auto c) { return std::sin(r + c); });
  ExtractionOptions opt;
  const VideoFeatures f = extract_features(t, "v1", 24.0, opt);
  EXPECT_TRUE(f.global.is_global());
  ASSERT_EQ(f.windows.size(), 2u);
  EXPECT_EQ(f.windows[1].window->index, 1);
  EXPECT_EQ(f.windows[0].values.size(), 172u);
}

}  // namespace
}  // namespace pcomp
