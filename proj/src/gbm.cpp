#include "partisan/learn/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "partisan/common/error.hpp"

namespace partisan::learn {

double RegressionTree::predict(const Eigen::RowVectorXd& x) const {
  int i = 0;
  while (nodes[static_cast<size_t>(i)].feature >= 0) {
    const TreeNode& nd = nodes[static_cast<size_t>(i)];
    i = x(nd.feature) <= nd.threshold ? nd.left : nd.right;
  }
  return nodes[static_cast<size_t>(i)].value;
}

double GbmModel::predict(const Eigen::RowVectorXd& x) const {
  return predict_prefix(x, trees.size());
}

double GbmModel::predict_prefix(const Eigen::RowVectorXd& x, size_t n_trees) const {
  double out = base;
  for (size_t t = 0; t < n_trees && t < trees.size(); ++t)
    out += learning_rate * trees[t].predict(x);
  return out;
}

Eigen::VectorXd GbmModel::predict(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::RowVectorXd row = X.row(i);
    out(i) = predict(row);
  }
  return out;
}

namespace {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double sse = 0.0;
};

// Best single split of rows by total child SSE; exact search over midpoints of
// consecutive distinct feature values.
SplitChoice best_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& target,
                       const std::vector<int>& rows) {
  const size_t m = rows.size();
  SplitChoice best;
  if (m < 2) return best;
  double total_sum = 0.0;
  for (int r : rows) total_sum += target(r);
  double parent_mean = total_sum / static_cast<double>(m);
  double parent_sse = 0.0;
  for (int r : rows) {
    double d = target(r) - parent_mean;
    parent_sse += d * d;
  }
  best.sse = parent_sse;

  std::vector<int> order(rows);
  for (int j = 0; j < X.cols(); ++j) {
    std::sort(order.begin(), order.end(), [&](int a, int b) { return X(a, j) < X(b, j); });
    double total_sq = 0.0;
    for (int r : rows) total_sq += target(r) * target(r);
    double left_sum = 0.0, left_sq = 0.0;
    for (size_t i = 0; i + 1 < m; ++i) {
      double v = target(order[i]);
      left_sum += v;
      left_sq += v * v;
      double xa = X(order[i], j), xb = X(order[i + 1], j);
      if (xa == xb) continue;
      double nl = static_cast<double>(i + 1);
      double nr = static_cast<double>(m - i - 1);
      double right_sum = total_sum - left_sum;
      double right_sq = total_sq - left_sq;
      double sse = (left_sq - left_sum * left_sum / nl) +
                   (right_sq - right_sum * right_sum / nr);
      if (sse < best.sse - 1e-12 * std::max(1.0, parent_sse)) {
        best.found = true;
        best.feature = j;
        best.threshold = 0.5 * (xa + xb);
        best.sse = sse;
      }
    }
  }
  return best;
}

int build_node(const Eigen::MatrixXd& X, const Eigen::VectorXd& target,
               std::vector<int>&& rows, int depth, int max_depth,
               std::vector<TreeNode>& nodes) {
  double sum = 0.0;
  for (int r : rows) sum += target(r);
  double mean = rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());

  int index = static_cast<int>(nodes.size());
  nodes.emplace_back();
  nodes[static_cast<size_t>(index)].value = mean;
  if (depth >= max_depth || rows.size() < 2) return index;

  SplitChoice split = best_split(X, target, rows);
  if (!split.found) return index;

  std::vector<int> left_rows, right_rows;
  for (int r : rows) {
    if (X(r, split.feature) <= split.threshold)
      left_rows.push_back(r);
    else
      right_rows.push_back(r);
  }
  rows.clear();
  int left = build_node(X, target, std::move(left_rows), depth + 1, max_depth, nodes);
  int right = build_node(X, target, std::move(right_rows), depth + 1, max_depth, nodes);
  TreeNode& nd = nodes[static_cast<size_t>(index)];
  nd.feature = split.feature;
  nd.threshold = split.threshold;
  nd.left = left;
  nd.right = right;
  return index;
}

}  // namespace

GbmModel fit_gbm(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, int n_trees,
                 double learning_rate, int max_depth, uint64_t) {
  const Eigen::Index n = y.size();
  if (X.rows() != n)
    throw Error(ErrorCode::Validation, "fit_gbm: X rows do not match y length");
  if (n < 2) throw Error(ErrorCode::Validation, "fit_gbm: need at least two rows");
  if (n_trees < 0) throw Error(ErrorCode::Validation, "fit_gbm: n_trees must be >= 0");
  if (max_depth < 1) throw Error(ErrorCode::Validation, "fit_gbm: max_depth must be >= 1");

  GbmModel model;
  model.base = y.mean();
  model.learning_rate = learning_rate;
  model.max_depth = max_depth;

  Eigen::VectorXd pred = Eigen::VectorXd::Constant(n, model.base);
  std::vector<int> all_rows(static_cast<size_t>(n));
  std::iota(all_rows.begin(), all_rows.end(), 0);

  for (int t = 0; t < n_trees; ++t) {
    Eigen::VectorXd resid = y - pred;
    if (resid.squaredNorm() <= 1e-24 * static_cast<double>(n)) break;
    RegressionTree tree;
    build_node(X, resid, std::vector<int>(all_rows), 0, max_depth, tree.nodes);
    for (Eigen::Index i = 0; i < n; ++i)
      pred(i) += learning_rate * tree.predict(X.row(i));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace partisan::learn
