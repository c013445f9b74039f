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
#include <array>
#include <random>
#include <set>

#include "pcomp/error.hpp"
#include "pcomp/eval.hpp"
#include "util.hpp"

namespace pcomp {

FoldPlan::FoldPlan(int k, std::uint64_t seed, std::map<std::string, int> assignment)
    : k_(k), seed_(seed), assignment_(std::move(assignment)) {}

int FoldPlan::fold_of(std::string_view video_id) const {
  auto it = assignment_.find(std::string(video_id));
  if (it == assignment_.end()) {
    throw InputError("video '" + std::string(video_id) + "' is not in the fold plan");
  }
  return it->second;
}

std::vector<std::string> FoldPlan::members(int fold) const {
  std::vector<std::string> out;
  for (const auto& [id, f] : assignment_) {
    if (f == fold) out.push_back(id);
  }
  return out;
}

namespace {

template <class T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[util::uniform_index(rng, i)]);
  }
}

}  // namespace

FoldPlan make_folds(std::span<const FoldInput> videos, int k, std::uint64_t seed) {
  if (k < 2) throw InputError("make_folds: k must be >= 2");
  struct Group {
    std::string person;
    std::vector<std::string> videos;
    std::array<double, 2> counts{0.0, 0.0};
  };
  std::map<std::string, Group> by_person;
  std::set<std::string> seen;
  std::array<double, 2> totals{0.0, 0.0};
  for (const auto& v : videos) {
    if (!seen.insert(v.video_id).second) {
      throw InputError("make_folds: duplicate video id '" + v.video_id + "'");
    }
    Group& g = by_person[v.person_id];
    g.person = v.person_id;
    g.videos.push_back(v.video_id);
    g.counts[static_cast<std::size_t>(v.label)] += 1.0;
    totals[static_cast<std::size_t>(v.label)] += 1.0;
  }
  if (by_person.size() < static_cast<std::size_t>(k)) {
    throw InputError("make_folds: " + std::to_string(by_person.size()) +
                     " distinct persons cannot fill " + std::to_string(k) + " folds");
  }
  std::vector<Group> groups;
  for (auto& [person, g] : by_person) groups.push_back(std::move(g));
  seeded_shuffle(groups, seed);
  std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    return a.videos.size() > b.videos.size();
  });

  const std::array<double, 2> quota{totals[0] / k, totals[1] / k};
  std::vector<std::array<double, 2>> fold_counts(static_cast<std::size_t>(k), {0.0, 0.0});
  std::map<std::string, int> assignment;
  for (const Group& g : groups) {
    int best = 0;
    double best_cost = 0.0, best_size = 0.0;
    for (int f = 0; f < k; ++f) {
      const auto& fc = fold_counts[static_cast<std::size_t>(f)];
      double cost = 0.0;
      for (std::size_t c = 0; c < 2; ++c) cost += std::max(0.0, fc[c] + g.counts[c] - quota[c]);
      const double size = fc[0] + fc[1];
      if (f == 0 || cost < best_cost || (cost == best_cost && size < best_size)) {
        best = f;
        best_cost = cost;
        best_size = size;
      }
    }
    auto& fc = fold_counts[static_cast<std::size_t>(best)];
    fc[0] += g.counts[0];
    fc[1] += g.counts[1];
    for (const auto& id : g.videos) assignment[id] = best;
  }
  return FoldPlan(k, seed, std::move(assignment));
}

FoldPlan make_shuffle_folds(std::span<const std::string> video_ids, int k, std::uint64_t seed) {
  if (k < 2) throw InputError("make_shuffle_folds: k must be >= 2");
  std::vector<std::string> ids(video_ids.begin(), video_ids.end());
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw InputError("make_shuffle_folds: duplicate video ids");
  }
  if (ids.size() < static_cast<std::size_t>(k)) {
    throw InputError("make_shuffle_folds: " + std::to_string(ids.size()) +
                     " videos cannot fill " + std::to_string(k) + " folds");
  }
  seeded_shuffle(ids, seed);
  std::map<std::string, int> assignment;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    assignment[ids[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  }
  return FoldPlan(k, seed, std::move(assignment));
}

}  // namespace pcomp
