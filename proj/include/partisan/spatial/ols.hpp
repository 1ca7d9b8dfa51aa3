#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace partisan::spatial {

struct Coefficient {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double t = 0.0;
  double p = 1.0;
};

struct OlsFit {
  std::vector<Coefficient> coefficients;  // intercept first
  double r2 = 0.0;
  double sigma2 = 0.0;  // ML estimate, RSS / n
  double loglik = 0.0;
  double aic = 0.0;
  int n = 0;
  int k_params = 0;  // coefficients + error variance

  Eigen::VectorXd beta() const;
};

// Least squares of y on [1 | X]; names label the slope columns. Inference uses
// Student-t with n - k_params degrees of freedom.
OlsFit fit_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
               const std::vector<std::string>& names);

}  // namespace partisan::spatial
