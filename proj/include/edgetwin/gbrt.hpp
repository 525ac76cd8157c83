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

#ifndef EDGETWIN__GBRT_HPP_
#define EDGETWIN__GBRT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace edgetwin
{

/// Flattened binary tree. Internal nodes route a row left when
/// row[feature] < threshold; leaves have feature == -1 and carry value.
struct TreeNode
{
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode &) const = default;
};

struct RegressionTree
{
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  int max_depth = 0;

  double predict(std::span<const double> row) const;
  /// Longest root-to-leaf path, in edges.
  int depth() const;

  bool operator==(const RegressionTree &) const = default;
};

struct BoostParams
{
  int n_trees = 200;
  double learning_rate = 0.1;
  int max_depth = 4;
  int min_samples_leaf = 5;
  /// Fraction of features offered to each tree (drawn with `seed`); 1.0
  /// gives the exact greedy search over every feature.
  double colsample = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const BoostParams &) const = default;
};

/// Read-only row-major matrix view.
struct MatrixView
{
  std::span<const double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const double> row(std::size_t i) const { return data.subspan(i * cols, cols); }
};

/// Squared-error gradient boosting: base + learning_rate * sum(tree(row)).
struct BoostedRegressor
{
  double base = 0.0;
  double learning_rate = 0.1;
  std::vector<RegressionTree> trees;

  double predict(std::span<const double> row) const;
  bool operator==(const BoostedRegressor &) const = default;
};

struct BoostFit
{
  BoostedRegressor model;
  /// Mean squared residual on the training rows: entry 0 before any tree,
  /// entry k after tree k. Non-increasing.
  std::vector<double> loss;
};

/// Fits a boosted ensemble. Each tree is grown level by level to max_depth
/// by exact greedy search over every (feature, midpoint between consecutive
/// distinct sorted values) candidate, maximizing the squared-error reduction;
/// ties keep the lowest feature index, then the lowest threshold. Leaves
/// predict the mean residual of their rows.
/// Throws EmptyDataset with fewer than 2 rows and BadParams on bad params.
BoostFit fit_boosted(const MatrixView & x, std::span<const double> y, const BoostParams & params);

/// One regression tree fit to `y` (no shrinkage); exposed for testing.
RegressionTree fit_tree(const MatrixView & x, std::span<const double> y, int max_depth,
                        int min_samples_leaf);

}  // namespace edgetwin

#endif  // EDGETWIN__GBRT_HPP_
