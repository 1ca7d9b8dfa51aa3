#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace partisan::learn {

// Axis-aligned regression tree stored as a flat node array; root at index 0.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   // rows with x[feature] <= threshold
  int right = -1;  // rows with x[feature] > threshold
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(const Eigen::RowVectorXd& x) const;
};

struct GbmModel {
  double base = 0.0;  // mean of the training response
  double learning_rate = 0.0;
  int max_depth = 0;
  std::vector<RegressionTree> trees;

  double predict(const Eigen::RowVectorXd& x) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
  // Prediction using only the first n_trees trees.
  double predict_prefix(const Eigen::RowVectorXd& x, size_t n_trees) const;
};

// Least-squares gradient boosting with greedy exact split search. Stops early
// once residuals vanish; constant responses need the base value only. The seed
// is reserved for stochastic variants; fitting is deterministic.
GbmModel fit_gbm(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, int n_trees,
                 double learning_rate, int max_depth, uint64_t seed = 0);

}  // namespace partisan::learn
