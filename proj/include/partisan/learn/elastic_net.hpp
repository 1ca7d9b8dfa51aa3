#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "partisan/common/error.hpp"

namespace partisan::learn {

struct ElasticNetFit {
  std::vector<std::string> names;
  double intercept = 0.0;                 // original scale
  std::vector<double> coefficients;       // original-scale slopes
  std::vector<double> std_coefficients;   // slopes on standardized features
  double alpha = 0.0;
  double l1_ratio = 0.0;
  double train_r2 = 0.0;
  int iterations = 0;

  double predict(const Eigen::RowVectorXd& x) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

// Thrown when coordinate descent runs out of sweeps; carries the last iterate.
class ElasticNetConvergenceError : public Error {
 public:
  ElasticNetConvergenceError(std::string message, ElasticNetFit last)
      : Error(ErrorCode::Convergence, std::move(message)), last_iterate(std::move(last)) {}
  ElasticNetFit last_iterate;
};

// Cyclic coordinate descent on standardized features / centered response,
// minimizing (1/2n)|y - Xb|^2 + alpha * (l1 |b|_1 + (1 - l1)/2 |b|^2).
ElasticNetFit fit_elastic_net(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                              const std::vector<std::string>& names, double alpha,
                              double l1_ratio, double tol = 1e-9, int max_iter = 100000);

struct CvCell {
  double alpha = 0.0;
  double l1_ratio = 0.0;
  double mean_r2 = 0.0;
};

struct CvResult {
  double best_alpha = 0.0;
  double best_l1_ratio = 0.0;
  std::vector<CvCell> cells;  // grid order: alphas outer, l1_ratios inner
  ElasticNetFit fit;          // refit of the best cell on the full data
};

// Seeded k-fold grid search; ties break toward smaller alpha, then smaller
// l1_ratio.
CvResult cv_grid_search(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                        const std::vector<std::string>& names,
                        const std::vector<double>& alphas,
                        const std::vector<double>& l1_ratios, int k, uint64_t seed,
                        double tol = 1e-9, int max_iter = 100000);

// Seeded shuffle split: first floor(ratio * n) indices train, rest test.
std::pair<std::vector<int>, std::vector<int>> train_test_split(int n, double ratio,
                                                               uint64_t seed);

}  // namespace partisan::learn
