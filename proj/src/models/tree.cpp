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

#include "pcomp/models/tree.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <utility>

#include <nlohmann/json.hpp>

#include "pcomp/error.hpp"
#include "util.hpp"

namespace pcomp::models {

int Tree::leaf_index(std::span<const double> x) const {
  int n = 0;
  while (!nodes[static_cast<std::size_t>(n)].is_leaf()) {
    const TreeNode& node = nodes[static_cast<std::size_t>(n)];
    n = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return n;
}

std::array<double, 2> Tree::class_probs(std::span<const double> x) const {
  const TreeNode& leaf = nodes[static_cast<std::size_t>(leaf_index(x))];
  return {(leaf.weight - leaf.sum) / leaf.weight, leaf.sum / leaf.weight};
}

int Tree::depth() const {
  if (nodes.empty()) return 0;
  int best = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [n, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const TreeNode& node = nodes[static_cast<std::size_t>(n)];
    if (!node.is_leaf()) {
      stack.push_back({node.left, d + 1});
      stack.push_back({node.right, d + 1});
    }
  }
  return best;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

nlohmann::json Tree::to_json() const {
  nlohmann::json f = nlohmann::json::array(), t = nlohmann::json::array(),
                 l = nlohmann::json::array(), r = nlohmann::json::array(),
                 v = nlohmann::json::array(), w = nlohmann::json::array(),
                 s = nlohmann::json::array();
  for (const auto& n : nodes) {
    f.push_back(n.feature);
    t.push_back(n.threshold);
    l.push_back(n.left);
    r.push_back(n.right);
    v.push_back(n.value);
    w.push_back(n.weight);
    s.push_back(n.sum);
  }
  return {{"feature", f}, {"threshold", t}, {"left", l},   {"right", r},
          {"value", v},   {"weight", w},    {"sum", s}};
}

Tree Tree::from_json(const nlohmann::json& j) {
  Tree tree;
  const auto& f = j.at("feature");
  tree.nodes.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    TreeNode& n = tree.nodes[i];
    n.feature = f[i].get<int>();
    n.threshold = j.at("threshold")[i].get<double>();
    n.left = j.at("left")[i].get<int>();
    n.right = j.at("right")[i].get<int>();
    n.value = j.at("value")[i].get<double>();
    n.weight = j.at("weight")[i].get<double>();
    n.sum = j.at("sum")[i].get<double>();
    if (!n.is_leaf() && (n.left <= 0 || n.right <= 0 ||
                         static_cast<std::size_t>(std::max(n.left, n.right)) >= f.size())) {
      throw InputError("corrupt tree: child index out of range");
    }
  }
  if (tree.nodes.empty()) throw InputError("corrupt tree: no nodes");
  return tree;
}

namespace {

struct BinStats {
  double w = 0.0;
  double s = 0.0;
  std::size_t count = 0;
};

struct Split {
  int feature = -1;
  int bin = -1;
  double score = -std::numeric_limits<double>::infinity();
};

class Builder {
 public:
  Builder(const BinnedMatrix& x, std::span<const double> y, std::span<const double> w,
          const TreeParams& params, Rng& rng)
      : x_(x), y_(y), w_(w), params_(params), rng_(rng) {
    features_.resize(x.cols());
    std::iota(features_.begin(), features_.end(), 0);
  }

  Tree build(std::vector<int>* leaf_of_sample) {
    std::vector<std::size_t> idx;
    idx.reserve(x_.rows());
    for (std::size_t i = 0; i < x_.rows(); ++i) {
      if (w_[i] > 0.0) idx.push_back(i);
    }
    if (idx.empty()) throw InputError("cannot grow a tree without samples");
    if (leaf_of_sample) leaf_of_sample->assign(x_.rows(), -1);

    Tree tree;
    tree.nodes.emplace_back();
    struct Pending {
      std::size_t begin, end;
      int node;
      int depth;
    };
    std::vector<Pending> stack{{0, idx.size(), 0, 0}};
    while (!stack.empty()) {
      const Pending p = stack.back();
      stack.pop_back();
      double wsum = 0.0, ssum = 0.0;
      double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
      for (std::size_t i = p.begin; i < p.end; ++i) {
        const std::size_t s = idx[i];
        wsum += w_[s];
        ssum += w_[s] * y_[s];
        ymin = std::min(ymin, y_[s]);
        ymax = std::max(ymax, y_[s]);
      }
      TreeNode& node = tree.nodes[static_cast<std::size_t>(p.node)];
      node.value = ssum / wsum;
      node.weight = wsum;
      node.sum = ssum;
      const std::size_t count = p.end - p.begin;
      const bool depth_reached = params_.max_depth > 0 && p.depth >= params_.max_depth;
      const bool too_small = count < 2 * static_cast<std::size_t>(params_.min_samples_leaf);
      const bool pure = ymin == ymax;
      Split split;
      if (!depth_reached && !too_small && !pure) {
        split = find_split(std::span<const std::size_t>(idx.data() + p.begin, count));
      }
      if (split.feature < 0) {
        if (leaf_of_sample) {
          for (std::size_t i = p.begin; i < p.end; ++i) (*leaf_of_sample)[idx[i]] = p.node;
        }
        continue;
      }
      const std::uint8_t* codes = x_.feature_codes(static_cast<std::size_t>(split.feature));
      const auto mid = std::partition(
          idx.begin() + static_cast<std::ptrdiff_t>(p.begin),
          idx.begin() + static_cast<std::ptrdiff_t>(p.end),
          [&](std::size_t s) { return codes[s] <= split.bin; });
      const std::size_t cut = static_cast<std::size_t>(mid - idx.begin());
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& parent = tree.nodes[static_cast<std::size_t>(p.node)];
      parent.feature = split.feature;
      parent.threshold = x_.threshold(static_cast<std::size_t>(split.feature), split.bin);
      parent.left = left;
      parent.right = left + 1;
      // Right first so the left subtree is numbered first.
      stack.push_back({cut, p.end, left + 1, p.depth + 1});
      stack.push_back({p.begin, cut, left, p.depth + 1});
    }
    return tree;
  }

 private:
  double proxy(double w, double s) const {
    if (params_.criterion == Criterion::kGini) return (s * s + (w - s) * (w - s)) / w;
    return s * s / w;
  }

  Split find_split(std::span<const std::size_t> samples) {
    const std::size_t d = x_.cols();
    const bool subsample = params_.max_features > 0 && static_cast<std::size_t>(params_.max_features) < d;
    if (subsample) {
      for (std::size_t i = d - 1; i > 0; --i) {
        std::swap(features_[i], features_[util::uniform_index(rng_, i + 1)]);
      }
    } else {
      std::iota(features_.begin(), features_.end(), 0);
    }
    Split best;
    int informative = 0;
    for (std::size_t k = 0; k < d; ++k) {
      const std::size_t f = features_[k];
      bool varies = false;
      scan_feature(f, samples, best, varies);
      if (varies) ++informative;
      if (subsample && informative >= params_.max_features) break;
    }
    return best;
  }

  // Updates `best` with the best split of feature f; `varies` reports whether
  // the node's samples span more than one bin.
  void scan_feature(std::size_t f, std::span<const std::size_t> samples, Split& best,
                    bool& varies) {
    const std::uint8_t* codes = x_.feature_codes(f);
    const int nbins = x_.bins(f);
    const std::size_t n = samples.size();
    ordered_.clear();
    if (n * 4 < static_cast<std::size_t>(nbins)) {
      // Few samples relative to bins: sort instead of histogramming.
      sorted_.clear();
      for (std::size_t s : samples) sorted_.push_back({codes[s], s});
      std::sort(sorted_.begin(), sorted_.end());
      for (const auto& [code, s] : sorted_) {
        if (ordered_.empty() || ordered_.back().first != code) ordered_.push_back({code, {}});
        BinStats& b = ordered_.back().second;
        b.w += w_[s];
        b.s += w_[s] * y_[s];
        ++b.count;
      }
    } else {
      hist_.assign(static_cast<std::size_t>(nbins), BinStats{});
      for (std::size_t s : samples) {
        BinStats& b = hist_[codes[s]];
        b.w += w_[s];
        b.s += w_[s] * y_[s];
        ++b.count;
      }
      for (int b = 0; b < nbins; ++b) {
        if (hist_[static_cast<std::size_t>(b)].count > 0) {
          ordered_.push_back({static_cast<std::uint8_t>(b), hist_[static_cast<std::size_t>(b)]});
        }
      }
    }
    varies = ordered_.size() > 1;
    if (!varies) return;
    double wt = 0.0, st = 0.0;
    for (const auto& [code, b] : ordered_) {
      wt += b.w;
      st += b.s;
    }
    const std::size_t min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);
    double wl = 0.0, sl = 0.0;
    std::size_t cl = 0;
    for (std::size_t i = 0; i + 1 < ordered_.size(); ++i) {
      wl += ordered_[i].second.w;
      sl += ordered_[i].second.s;
      cl += ordered_[i].second.count;
      if (cl < min_leaf || n - cl < min_leaf) continue;
      const double score = proxy(wl, sl) + proxy(wt - wl, st - sl);
      if (score > best.score) {
        best.score = score;
        best.feature = static_cast<int>(f);
        best.bin = ordered_[i].first;
      }
    }
  }

  const BinnedMatrix& x_;
  std::span<const double> y_;
  std::span<const double> w_;
  const TreeParams& params_;
  Rng& rng_;
  std::vector<std::size_t> features_;
  std::vector<BinStats> hist_;
  std::vector<std::pair<std::uint8_t, std::size_t>> sorted_;
  std::vector<std::pair<std::uint8_t, BinStats>> ordered_;
};

}  // namespace

Tree grow_tree(const BinnedMatrix& x, std::span<const double> y, std::span<const double> weights,
               const TreeParams& params, Rng& rng, std::vector<int>* leaf_of_sample) {
  if (y.size() != x.rows() || weights.size() != x.rows()) {
    throw InputError("grow_tree: targets/weights do not match the sample count");
  }
  if (params.min_samples_leaf < 1) throw InputError("min_samples_leaf must be >= 1");
  Builder builder(x, y, weights, params, rng);
  return builder.build(leaf_of_sample);
}

}  // namespace pcomp::models
