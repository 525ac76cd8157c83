// Copyright 2026 The edgetwin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "edgetwin/gbrt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "edgetwin/error.hpp"
#include "edgetwin/rng.hpp"

namespace edgetwin
{

double RegressionTree::predict(std::span<const double> row) const
{
  int k = 0;
  while (!nodes[static_cast<std::size_t>(k)].is_leaf()) {
    const auto & n = nodes[static_cast<std::size_t>(k)];
    k = row[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(k)].value;
}

int RegressionTree::depth() const
{
  if (nodes.empty()) {
    return 0;
  }
  std::function<int(int)> walk = [&](int k) -> int {
    const auto & n = nodes[static_cast<std::size_t>(k)];
    return n.is_leaf() ? 0 : 1 + std::max(walk(n.left), walk(n.right));
  };
  return walk(0);
}

void BoostParams::validate() const
{
  if (n_trees < 1 || max_depth < 1 || min_samples_leaf < 1) {
    throw Error(ErrorCode::BadParams, "n_trees, max_depth and min_samples_leaf must be >= 1");
  }
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw Error(ErrorCode::BadParams, "learning_rate must lie in (0, 1]");
  }
  if (!(colsample > 0.0 && colsample <= 1.0)) {
    throw Error(ErrorCode::BadParams, "colsample must lie in (0, 1]");
  }
}

double BoostedRegressor::predict(std::span<const double> row) const
{
  double sum = 0.0;
  for (const auto & t : trees) {
    sum += t.predict(row);
  }
  return base + learning_rate * sum;
}

namespace
{

/// Presorted columns shared by every tree of one fit.
class TreeBuilder
{
public:
  TreeBuilder(const MatrixView & x, int max_depth, int min_samples_leaf)
  : x_(x), max_depth_(max_depth), min_leaf_(static_cast<std::size_t>(min_samples_leaf))
  {
    sorted_rows_.resize(x.cols);
    sorted_vals_.resize(x.cols);
    std::vector<std::uint32_t> order(x.rows);
    for (std::size_t f = 0; f < x.cols; ++f) {
      std::iota(order.begin(), order.end(), 0u);
      std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return value(a, f) < value(b, f);
      });
      sorted_rows_[f] = order;
      auto & vals = sorted_vals_[f];
      vals.resize(x.rows);
      for (std::size_t i = 0; i < x.rows; ++i) {
        vals[i] = value(order[i], f);
      }
    }
    node_of_.resize(x.rows);
  }

  /// Grows one tree on `residual`; leaf_of_row() then maps rows to leaves.
  RegressionTree grow(std::span<const double> residual, std::span<const int> features);

  std::span<const int> leaf_of_row() const { return node_of_; }

private:
  struct NodeStats
  {
    std::size_t n = 0;
    double sum = 0.0;
    double sumsq = 0.0;
  };
  struct Candidate
  {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
  };
  struct Accumulator
  {
    std::size_t n = 0;
    double sum = 0.0;
    double last = 0.0;
  };

  double value(std::size_t row, std::size_t f) const { return x_.data[row * x_.cols + f]; }

  const MatrixView & x_;
  int max_depth_;
  std::size_t min_leaf_;
  std::vector<std::vector<std::uint32_t>> sorted_rows_;
  std::vector<std::vector<double>> sorted_vals_;
  std::vector<int> node_of_;
};

RegressionTree TreeBuilder::grow(std::span<const double> residual, std::span<const int> features)
{
  RegressionTree tree;
  tree.max_depth = max_depth_;
  tree.nodes.push_back(TreeNode{});
  std::vector<NodeStats> stats(1);
  std::fill(node_of_.begin(), node_of_.end(), 0);
  for (std::size_t r = 0; r < x_.rows; ++r) {
    stats[0].n += 1;
    stats[0].sum += residual[r];
    stats[0].sumsq += residual[r] * residual[r];
  }

  std::vector<int> frontier;
  if (stats[0].n >= 2 * min_leaf_) {
    frontier.push_back(0);
  }
  for (int depth = 0; depth < max_depth_ && !frontier.empty(); ++depth) {
    std::vector<int> slot_of_node(tree.nodes.size(), -1);
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      slot_of_node[static_cast<std::size_t>(frontier[i])] = static_cast<int>(i);
    }
    std::vector<Candidate> best(frontier.size());
    std::vector<Accumulator> acc(frontier.size());
    for (const int f : features) {
      std::fill(acc.begin(), acc.end(), Accumulator{});
      const auto & rows = sorted_rows_[static_cast<std::size_t>(f)];
      const auto & vals = sorted_vals_[static_cast<std::size_t>(f)];
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = rows[i];
        const int slot = slot_of_node[static_cast<std::size_t>(node_of_[r])];
        if (slot < 0) {
          continue;
        }
        auto & a = acc[static_cast<std::size_t>(slot)];
        const auto & node = stats[static_cast<std::size_t>(frontier[static_cast<std::size_t>(slot)])];
        const double v = vals[i];
        if (a.n >= min_leaf_ && v > a.last && node.n - a.n >= min_leaf_) {
          const double nl = static_cast<double>(a.n);
          const double nr = static_cast<double>(node.n - a.n);
          const double sr = node.sum - a.sum;
          const double gain = a.sum * a.sum / nl + sr * sr / nr -
                              node.sum * node.sum / static_cast<double>(node.n);
          auto & b = best[static_cast<std::size_t>(slot)];
          if (gain > b.gain) {
            double threshold = a.last + 0.5 * (v - a.last);
            if (!(threshold > a.last)) {
              threshold = v;
            }
            b = Candidate{gain, f, threshold};
          }
        }
        a.n += 1;
        a.sum += residual[r];
        a.last = v;
      }
    }

    // Split nodes whose best reduction is meaningful relative to their SSE.
    std::vector<int> next;
    std::vector<int> left_of(tree.nodes.size(), -1);
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const int k = frontier[i];
      const auto & s = stats[static_cast<std::size_t>(k)];
      const double sse = s.sumsq - s.sum * s.sum / static_cast<double>(s.n);
      const auto & b = best[i];
      if (b.feature < 0 || !(b.gain > 1e-12 * std::max(sse, 0.0)) || !(sse > 0.0)) {
        continue;
      }
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back(TreeNode{});
      tree.nodes.push_back(TreeNode{});
      stats.resize(tree.nodes.size());
      auto & node = tree.nodes[static_cast<std::size_t>(k)];
      node.feature = b.feature;
      node.threshold = b.threshold;
      node.left = left;
      node.right = left + 1;
      left_of[static_cast<std::size_t>(k)] = left;
    }
    for (std::size_t r = 0; r < x_.rows; ++r) {
      const int k = node_of_[r];
      if (static_cast<std::size_t>(k) >= left_of.size() || left_of[static_cast<std::size_t>(k)] < 0) {
        continue;
      }
      const auto & node = tree.nodes[static_cast<std::size_t>(k)];
      const int child =
        value(r, static_cast<std::size_t>(node.feature)) < node.threshold ? node.left : node.right;
      node_of_[r] = child;
      auto & cs = stats[static_cast<std::size_t>(child)];
      cs.n += 1;
      cs.sum += residual[r];
      cs.sumsq += residual[r] * residual[r];
    }
    for (std::size_t k = 0; k < left_of.size(); ++k) {
      const int left = left_of[k];
      if (left < 0) {
        continue;
      }
      for (const int child : {left, left + 1}) {
        if (stats[static_cast<std::size_t>(child)].n >= 2 * min_leaf_) {
          next.push_back(child);
        }
      }
    }
    frontier = std::move(next);
  }

  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    auto & node = tree.nodes[k];
    if (node.is_leaf()) {
      node.value = stats[k].n > 0 ? stats[k].sum / static_cast<double>(stats[k].n) : 0.0;
    }
  }
  return tree;
}

void check_inputs(const MatrixView & x, std::span<const double> y)
{
  if (x.rows < 2 || y.size() < 2) {
    throw Error(ErrorCode::EmptyDataset, "need at least 2 rows to train");
  }
  if (y.size() != x.rows || x.data.size() != x.rows * x.cols || x.cols == 0) {
    throw Error(ErrorCode::DimensionMismatch, "features and targets disagree in shape");
  }
}

}  // namespace

RegressionTree fit_tree(const MatrixView & x, std::span<const double> y, int max_depth,
                        int min_samples_leaf)
{
  check_inputs(x, y);
  TreeBuilder builder(x, max_depth, min_samples_leaf);
  std::vector<int> all(x.cols);
  std::iota(all.begin(), all.end(), 0);
  return builder.grow(y, all);
}

BoostFit fit_boosted(const MatrixView & x, std::span<const double> y, const BoostParams & params)
{
  params.validate();
  check_inputs(x, y);
  BoostFit fit;
  fit.model.learning_rate = params.learning_rate;
  fit.model.base = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());

  std::vector<double> residual(y.begin(), y.end());
  for (auto & r : residual) {
    r -= fit.model.base;
  }
  auto mse = [&] {
    double s = 0.0;
    for (const double r : residual) {
      s += r * r;
    }
    return s / static_cast<double>(residual.size());
  };
  fit.loss.push_back(mse());

  TreeBuilder builder(x, params.max_depth, params.min_samples_leaf);
  const auto n_pick = std::max<std::size_t>(
    1, static_cast<std::size_t>(std::llround(params.colsample * static_cast<double>(x.cols))));
  std::vector<int> all(x.cols);
  std::iota(all.begin(), all.end(), 0);
  for (int t = 0; t < params.n_trees; ++t) {
    std::vector<int> features = all;
    if (n_pick < x.cols) {
      Rng rng(derive_seed(params.seed, "tree-" + std::to_string(t)));
      for (std::size_t i = features.size() - 1; i > 0; --i) {
        std::swap(features[i], features[rng.index(i + 1)]);
      }
      features.resize(n_pick);
      std::sort(features.begin(), features.end());
    }
    auto tree = builder.grow(residual, features);
    const auto leaves = builder.leaf_of_row();
    for (std::size_t r = 0; r < residual.size(); ++r) {
      residual[r] -= params.learning_rate * tree.nodes[static_cast<std::size_t>(leaves[r])].value;
    }
    fit.model.trees.push_back(std::move(tree));
    fit.loss.push_back(mse());
  }
  return fit;
}

}  // namespace edgetwin
