#include <doctest.h>

#include <algorithm>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "edgetwin/error.hpp"
#include "edgetwin/gbrt.hpp"

using namespace edgetwin;

namespace
{

struct Matrix
{
  std::vector<double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  MatrixView view() const { return {data, rows, cols}; }
};

Matrix random_matrix(std::mt19937_64 & eng, std::size_t rows, std::size_t cols, int levels)
{
  Matrix m{std::vector<double>(rows * cols), rows, cols};
  std::uniform_int_distribution<int> u(0, levels - 1);
  for (auto & v : m.data) {
    v = 0.5 * u(eng);
  }
  return m;
}

// Independent walk over the flattened tree.
double walk(const RegressionTree & tree, std::span<const double> row, int node = 0)
{
  const auto & n = tree.nodes[static_cast<std::size_t>(node)];
  if (n.feature < 0) {
    return n.value;
  }
  return walk(tree, row, row[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
}

int walk_depth(const RegressionTree & tree, int node = 0)
{
  const auto & n = tree.nodes[static_cast<std::size_t>(node)];
  if (n.feature < 0) {
    return 0;
  }
  return 1 + std::max(walk_depth(tree, n.left), walk_depth(tree, n.right));
}

double mse(const Matrix & x, std::span<const double> y, const BoostedRegressor & model)
{
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double r = y[i] - model.predict(x.view().row(i));
    s += r * r;
  }
  return s / static_cast<double>(x.rows);
}

}  // namespace

TEST_CASE("constant target is a fixed point")
{
  std::mt19937_64 eng(3);
  const auto x = random_matrix(eng, 50, 4, 5);
  const std::vector<double> y(50, 2.5);
  BoostParams p;
  p.n_trees = 20;
  const auto fit = fit_boosted(x.view(), y, p);
  CHECK(fit.model.base == 2.5);
  for (const auto & t : fit.model.trees) {
    for (const auto & n : t.nodes) {
      CHECK(n.is_leaf());
      CHECK(n.value == 0.0);
    }
  }
  for (std::size_t i = 0; i < x.rows; ++i) {
    CHECK(fit.model.predict(x.view().row(i)) == 2.5);
  }
}

TEST_CASE("linear target in one feature: monotone loss ending below a tenth of the start")
{
  std::mt19937_64 eng(5);
  Matrix x{std::vector<double>(400 * 3), 400, 3};
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> y(400);
  for (std::size_t i = 0; i < 400; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      x.data[i * 3 + j] = u(eng);
    }
    y[i] = x.data[i * 3];
  }
  BoostParams p;
  p.n_trees = 200;
  p.learning_rate = 0.1;
  p.max_depth = 3;
  const auto fit = fit_boosted(x.view(), y, p);
  REQUIRE(fit.loss.size() == 201);
  for (std::size_t k = 1; k < fit.loss.size(); ++k) {
    CHECK(fit.loss[k] <= fit.loss[k - 1] * (1.0 + 1e-12));
  }
  CHECK(fit.loss.back() < fit.loss.front() / 10.0);
  CHECK(mse(x, y, fit.model) == doctest::Approx(fit.loss.back()).epsilon(1e-9));
}

TEST_CASE("depth-1 tree equals a brute-force best split")
{
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 eng(seed);
    const auto x = random_matrix(eng, 40, 3, 6);
    std::vector<double> y(40);
    std::normal_distribution<double> n(0.0, 1.0);
    for (auto & v : y) {
      v = n(eng);
    }
    const int min_leaf = 3;
    // Oracle: enumerate every feature and midpoint, keep the lowest SSE,
    // first found on ties (features ascending, thresholds ascending).
    double best_sse = std::numeric_limits<double>::infinity();
    int best_f = -1;
    double best_t = 0.0;
    double total_sse = 0.0;
    {
      double m = 0.0;
      for (double v : y) m += v;
      m /= 40.0;
      for (double v : y) total_sse += (v - m) * (v - m);
    }
    for (std::size_t f = 0; f < 3; ++f) {
      std::set<double> vals;
      for (std::size_t i = 0; i < 40; ++i) vals.insert(x.data[i * 3 + f]);
      std::vector<double> sorted(vals.begin(), vals.end());
      for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
        const double t = 0.5 * (sorted[k] + sorted[k + 1]);
        double sl = 0, sr = 0;
        int nl = 0, nr = 0;
        for (std::size_t i = 0; i < 40; ++i) {
          if (x.data[i * 3 + f] < t) { sl += y[i]; ++nl; } else { sr += y[i]; ++nr; }
        }
        if (nl < min_leaf || nr < min_leaf) continue;
        const double ml = sl / nl, mr = sr / nr;
        double sse = 0.0;
        for (std::size_t i = 0; i < 40; ++i) {
          const double m = x.data[i * 3 + f] < t ? ml : mr;
          sse += (y[i] - m) * (y[i] - m);
        }
        if (sse < best_sse - 1e-9 * total_sse) {
          best_sse = sse;
          best_f = static_cast<int>(f);
          best_t = t;
        }
      }
    }
    const auto tree = fit_tree(x.view(), y, 1, min_leaf);
    REQUIRE(best_f >= 0);
    REQUIRE(tree.nodes.size() == 3);
    CHECK(tree.nodes[0].feature == best_f);
    CHECK(tree.nodes[0].threshold == doctest::Approx(best_t));
    double pred_sse = 0.0;
    for (std::size_t i = 0; i < 40; ++i) {
      const double r = y[i] - tree.predict(x.view().row(i));
      pred_sse += r * r;
    }
    CHECK(pred_sse == doctest::Approx(best_sse).epsilon(1e-9));
  }
}

TEST_CASE("prediction equals base plus shrunk sum of independent tree walks")
{
  std::mt19937_64 eng(11);
  const auto x = random_matrix(eng, 200, 5, 8);
  std::vector<double> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    y[i] = x.data[i * 5] * x.data[i * 5 + 1] - x.data[i * 5 + 4];
  }
  BoostParams p;
  p.n_trees = 30;
  const auto fit = fit_boosted(x.view(), y, p);
  for (std::size_t i = 0; i < x.rows; ++i) {
    double s = 0.0;
    for (const auto & t : fit.model.trees) {
      s += walk(t, x.view().row(i));
    }
    CHECK(fit.model.predict(x.view().row(i)) ==
          doctest::Approx(fit.model.base + p.learning_rate * s).epsilon(1e-12));
  }
}

TEST_CASE("property: boosting loss is non-increasing and trees respect their limits")
{
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    std::mt19937_64 eng(seed * 7 + 1);
    std::uniform_int_distribution<int> rows(2, 120);
    std::uniform_int_distribution<int> cols(1, 6);
    const auto r = static_cast<std::size_t>(rows(eng));
    const auto c = static_cast<std::size_t>(cols(eng));
    const auto x = random_matrix(eng, r, c, 1 + static_cast<int>(seed % 7));
    std::vector<double> y(r);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (auto & v : y) v = u(eng);
    BoostParams p;
    p.n_trees = 1 + static_cast<int>(seed % 15);
    p.learning_rate = 0.05 + 0.04 * static_cast<double>(seed % 20);
    p.max_depth = 1 + static_cast<int>(seed % 5);
    p.min_samples_leaf = 1 + static_cast<int>(seed % 4);
    p.colsample = seed % 3 == 0 ? 0.5 : 1.0;
    p.seed = seed;
    const auto fit = fit_boosted(x.view(), y, p);
    REQUIRE(fit.loss.size() == fit.model.trees.size() + 1);
    for (std::size_t k = 1; k < fit.loss.size(); ++k) {
      CHECK(fit.loss[k] <= fit.loss[k - 1] * (1.0 + 1e-12) + 1e-15);
    }
    for (const auto & t : fit.model.trees) {
      CHECK(walk_depth(t) <= p.max_depth);
      CHECK(t.depth() == walk_depth(t));
      for (const auto & n : t.nodes) {
        if (!n.is_leaf()) {
          CHECK(n.feature < static_cast<int>(c));
        }
      }
    }
    const auto again = fit_boosted(x.view(), y, p);
    CHECK(again.model == fit.model);
  }
}

TEST_CASE("leaves honor min_samples_leaf")
{
  std::mt19937_64 eng(21);
  const auto x = random_matrix(eng, 90, 2, 30);
  std::vector<double> y(90);
  for (std::size_t i = 0; i < 90; ++i) y[i] = x.data[i * 2] > 5.0 ? 1.0 : 0.0;
  const auto tree = fit_tree(x.view(), y, 6, 7);
  std::map<const TreeNode *, int> counts;
  for (std::size_t i = 0; i < 90; ++i) {
    const auto row = x.view().row(i);
    int node = 0;
    while (!tree.nodes[static_cast<std::size_t>(node)].is_leaf()) {
      const auto & n = tree.nodes[static_cast<std::size_t>(node)];
      node = row[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
    }
    ++counts[&tree.nodes[static_cast<std::size_t>(node)]];
  }
  for (const auto & [leaf, n] : counts) {
    CHECK(n >= 7);
  }
}

TEST_CASE("identical rows predict the target mean")
{
  Matrix x{std::vector<double>(10 * 2, 1.0), 10, 2};
  std::vector<double> y{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto fit = fit_boosted(x.view(), y, BoostParams{});
  CHECK(fit.model.predict(x.view().row(0)) == doctest::Approx(4.5));
}

TEST_CASE("bad inputs")
{
  Matrix x{{1.0}, 1, 1};
  std::vector<double> y{1.0};
  try {
    fit_boosted(x.view(), y, BoostParams{});
    FAIL("expected EmptyDataset");
  } catch (const Error & e) {
    CHECK(e.code() == ErrorCode::EmptyDataset);
  }
  Matrix x2{{1.0, 2.0}, 2, 1};
  std::vector<double> y2{1.0, 2.0};
  BoostParams p;
  p.learning_rate = 0.0;
  CHECK_THROWS_AS(fit_boosted(x2.view(), y2, p), Error);
  p = {};
  p.max_depth = 0;
  CHECK_THROWS_AS(fit_boosted(x2.view(), y2, p), Error);
  p = {};
  p.colsample = 1.5;
  CHECK_THROWS_AS(fit_boosted(x2.view(), y2, p), Error);
}

TEST_CASE("step target in one feature: first split at the straddling midpoint")
{
  Matrix x{{-3.0, -2.0, -1.5, -0.5, 0.25, 1.0, 2.0, 4.0}, 8, 1};
  std::vector<double> y{-1, -1, -1, -1, 1, 1, 1, 1};
  BoostParams p;
  p.n_trees = 1;
  p.learning_rate = 1.0;
  p.max_depth = 1;
  p.min_samples_leaf = 1;
  const auto fit = fit_boosted(x.view(), y, p);
  const auto & root = fit.model.trees.at(0).nodes.at(0);
  CHECK(root.feature == 0);
  CHECK(root.threshold == doctest::Approx(-0.125));
  CHECK(fit.model.predict(std::vector<double>{-5.0}) == doctest::Approx(-1.0));
  CHECK(fit.model.predict(std::vector<double>{5.0}) == doctest::Approx(1.0));
}
