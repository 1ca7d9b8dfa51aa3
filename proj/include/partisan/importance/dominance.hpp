#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace partisan::importance {

struct DominanceRow {
  std::string predictor;
  double interactional = 0.0;
  double individual = 0.0;
  double average_partial = 0.0;  // NaN when p < 3 (no intermediate levels)
  double total = 0.0;
  double percent = 0.0;
};

struct DominanceReport {
  std::vector<DominanceRow> rows;  // predictor order preserved from X
  double full_model_r2 = 0.0;
  int p = 0;
};

// Fits all 2^p sub-models (intercept always included, empty subset R^2 = 0)
// and averages the incremental R^2 of each predictor across subset levels.
DominanceReport dominance_analysis(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                   const std::vector<std::string>& names);

// (individual + (p-2) * average_partial + interactional) / p, the level
// recombination for p >= 3.
double combine_dominance_levels(double individual, double average_partial,
                                double interactional, int p);

}  // namespace partisan::importance
