#include "partisan/spatial/ols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "partisan/common/error.hpp"
#include "partisan/stats/distributions.hpp"

namespace partisan::spatial {

Eigen::VectorXd OlsFit::beta() const {
  Eigen::VectorXd b(static_cast<Eigen::Index>(coefficients.size()));
  for (size_t i = 0; i < coefficients.size(); ++i)
    b(static_cast<Eigen::Index>(i)) = coefficients[i].estimate;
  return b;
}

OlsFit fit_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
               const std::vector<std::string>& names) {
  const Eigen::Index n = y.size();
  const Eigen::Index p = X.cols();
  if (X.rows() != n)
    throw Error(ErrorCode::Validation, "fit_ols: X rows do not match y length");
  if (static_cast<Eigen::Index>(names.size()) != p)
    throw Error(ErrorCode::Validation, "fit_ols: name count does not match X columns");
  const Eigen::Index n_coef = p + 1;
  const int k_params = static_cast<int>(n_coef) + 1;
  if (n <= k_params)
    throw Error(ErrorCode::Validation, "fit_ols: need n > k_params");

  Eigen::MatrixXd D(n, n_coef);
  D.col(0).setOnes();
  if (p > 0) D.rightCols(p) = X;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
  if (qr.rank() < n_coef)
    throw Error(ErrorCode::SingularDesign, "fit_ols: design matrix is rank deficient");

  Eigen::VectorXd beta = qr.solve(y);
  Eigen::VectorXd resid = y - D * beta;
  const double rss = resid.squaredNorm();

  // (D'D)^-1 from the pivoted QR factors.
  Eigen::MatrixXd r = qr.matrixR().topLeftCorner(n_coef, n_coef).triangularView<Eigen::Upper>();
  Eigen::MatrixXd rinv = r.triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(n_coef, n_coef));
  Eigen::MatrixXd dtd_inv_perm = rinv * rinv.transpose();
  Eigen::MatrixXd perm = qr.colsPermutation();
  Eigen::MatrixXd dtd_inv = perm * dtd_inv_perm * perm.transpose();

  const double df = static_cast<double>(n) - static_cast<double>(k_params);
  const double s2 = rss / df;

  OlsFit fit;
  fit.n = static_cast<int>(n);
  fit.k_params = k_params;
  fit.sigma2 = rss / static_cast<double>(n);
  fit.coefficients.resize(static_cast<size_t>(n_coef));
  for (Eigen::Index j = 0; j < n_coef; ++j) {
    Coefficient& c = fit.coefficients[static_cast<size_t>(j)];
    c.name = j == 0 ? "intercept" : names[static_cast<size_t>(j - 1)];
    c.estimate = beta(j);
    c.se = std::sqrt(s2 * dtd_inv(j, j));
    if (c.se > 0.0) {
      c.t = c.estimate / c.se;
      c.p = stats::student_t_two_sided_p(c.t, df);
    } else {
      c.t = c.estimate == 0.0 ? 0.0
                              : std::copysign(std::numeric_limits<double>::infinity(),
                                              c.estimate);
      c.p = c.estimate == 0.0 ? 1.0 : 0.0;
    }
  }

  const double mean_y = y.mean();
  const double tss = (y.array() - mean_y).square().sum();
  fit.r2 = tss > 0.0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 0.0;

  const double nd = static_cast<double>(n);
  fit.loglik = -0.5 * nd * (std::log(2.0 * std::numbers::pi) + std::log(fit.sigma2) + 1.0);
  fit.aic = 2.0 * k_params - 2.0 * fit.loglik;
  return fit;
}

}  // namespace partisan::spatial
