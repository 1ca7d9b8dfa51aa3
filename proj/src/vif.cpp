#include "partisan/stats/vif.hpp"

#include "partisan/common/error.hpp"

namespace partisan::stats {

std::vector<double> vif(const Eigen::MatrixXd& X,
                        const std::vector<std::string>& names) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (static_cast<Eigen::Index>(names.size()) != p)
    throw Error(ErrorCode::Validation, "vif: names/columns mismatch");
  if (n <= p)
    throw Error(ErrorCode::Validation, "vif requires more rows than features");

  std::vector<double> out(static_cast<size_t>(p));
  Eigen::MatrixXd aux(n, p);  // intercept + the p-1 other columns
  for (Eigen::Index j = 0; j < p; ++j) {
    aux.col(0).setOnes();
    Eigen::Index c = 1;
    for (Eigen::Index m = 0; m < p; ++m)
      if (m != j) aux.col(c++) = X.col(m);
    Eigen::VectorXd y = X.col(j);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(aux);
    if (qr.rank() < p)
      throw Error(ErrorCode::SingularDesign,
                  "vif: auxiliary regression for '" + names[static_cast<size_t>(j)] +
                      "' is rank deficient");
    Eigen::VectorXd resid = y - aux * qr.solve(y);
    double rss = resid.squaredNorm();
    double mean = y.mean();
    double tss = (y.array() - mean).matrix().squaredNorm();
    if (tss <= 0.0)
      throw Error(ErrorCode::DegenerateVariance,
                  "vif: feature '" + names[static_cast<size_t>(j)] + "' is constant");
    double r2 = 1.0 - rss / tss;
    if (r2 >= 1.0 - 1e-12)
      throw Error(ErrorCode::InfiniteVif,
                  "feature '" + names[static_cast<size_t>(j)] +
                      "' is collinear with the others");
    out[static_cast<size_t>(j)] = 1.0 / (1.0 - r2);
  }
  return out;
}

}  // namespace partisan::stats
