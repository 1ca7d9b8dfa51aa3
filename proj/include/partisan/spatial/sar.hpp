#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "partisan/spatial/ols.hpp"
#include "partisan/spatial/weights.hpp"

namespace partisan::spatial {

struct SarFit {
  double rho = 0.0;
  double rho_se = 0.0;
  double rho_t = 0.0;
  double rho_p = 1.0;
  std::vector<Coefficient> coefficients;  // intercept first
  double sigma2 = 0.0;
  double r2 = 0.0;                 // squared correlation of y with reduced-form fit
  double r2_variance_ratio = 0.0;  // var(fitted) / var(y), reported when it disagrees
  double loglik = 0.0;
  double aic = 0.0;
  int n = 0;
  int k_params = 0;  // coefficients + rho + error variance
};

// ln|I - rho W| by sparse LU; the determinant sign must be positive.
double log_det_profile(const SpatialWeights& w, double rho);

// Maximum-likelihood spatial autoregressive lag model
// y = rho W y + alpha + X beta + eps, via golden-section search on the
// concentrated log-likelihood. Standard errors come from a central-difference
// numerical Hessian of the full log-likelihood.
SarFit fit_spatial_lag(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                       const std::vector<std::string>& names,
                       const SpatialWeights& w);

}  // namespace partisan::spatial
