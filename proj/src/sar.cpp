#include "partisan/spatial/sar.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "partisan/common/error.hpp"
#include "partisan/stats/distributions.hpp"
#include "partisan/stats/tests.hpp"

namespace partisan::spatial {

namespace {

Eigen::SparseMatrix<double> identity_minus(const SpatialWeights& w, double rho) {
  const Eigen::Index n = w.w.rows();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(w.w.nonZeros()) + static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) trips.emplace_back(i, i, 1.0);
  for (Eigen::Index i = 0; i < w.w.outerSize(); ++i)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(w.w, i); it; ++it)
      trips.emplace_back(it.row(), it.col(), -rho * it.value());
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

}  // namespace

double log_det_profile(const SpatialWeights& w, double rho) {
  Eigen::SparseMatrix<double> a = identity_minus(w, rho);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalError, "log_det_profile: sparse LU factorization failed");
  if (lu.signDeterminant() <= 0)
    throw Error(ErrorCode::NumericalError, "log_det_profile: determinant sign not positive");
  return lu.logAbsDeterminant();
}

SarFit fit_spatial_lag(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                       const std::vector<std::string>& names,
                       const SpatialWeights& w) {
  const Eigen::Index n = y.size();
  const Eigen::Index p = X.cols();
  if (X.rows() != n)
    throw Error(ErrorCode::Validation, "fit_spatial_lag: X rows do not match y length");
  if (static_cast<Eigen::Index>(names.size()) != p)
    throw Error(ErrorCode::Validation, "fit_spatial_lag: name count does not match X columns");
  if (static_cast<Eigen::Index>(w.size()) != n)
    throw Error(ErrorCode::Validation, "fit_spatial_lag: weights size does not match y length");
  const Eigen::Index n_coef = p + 1;
  const int k_params = static_cast<int>(n_coef) + 2;
  if (n <= k_params)
    throw Error(ErrorCode::Validation, "fit_spatial_lag: need n > k_params");

  Eigen::MatrixXd D(n, n_coef);
  D.col(0).setOnes();
  if (p > 0) D.rightCols(p) = X;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
  if (qr.rank() < n_coef)
    throw Error(ErrorCode::SingularDesign, "fit_spatial_lag: design matrix is rank deficient");

  const Eigen::VectorXd wy = w.w * y;
  const Eigen::VectorXd b_o = qr.solve(y);
  const Eigen::VectorXd b_l = qr.solve(wy);
  const Eigen::VectorXd e_o = y - D * b_o;
  const Eigen::VectorXd e_l = wy - D * b_l;
  const double eoo = e_o.squaredNorm();
  const double eol = e_o.dot(e_l);
  const double ell = e_l.squaredNorm();

  const double nd = static_cast<double>(n);
  std::map<double, double> log_det_cache;
  auto log_det = [&](double rho) {
    auto it = log_det_cache.find(rho);
    if (it != log_det_cache.end()) return it->second;
    double v = log_det_profile(w, rho);
    log_det_cache.emplace(rho, v);
    return v;
  };
  auto concentrated = [&](double rho) {
    double ess = std::max(eoo - 2.0 * rho * eol + rho * rho * ell, 1e-300);
    return -0.5 * nd * (std::log(2.0 * std::numbers::pi) + 1.0) -
           0.5 * nd * std::log(ess / nd) + log_det(rho);
  };

  // Golden-section search for the maximizer over the feasible interval.
  constexpr double kEps = 1e-6;
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = -1.0 + kEps, hi = 1.0 - kEps;
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = concentrated(c), fd = concentrated(d);
  int iter = 0;
  while (hi - lo > 1e-9) {
    if (++iter > 200)
      throw Error(ErrorCode::Convergence,
                  "fit_spatial_lag: golden-section search exceeded 200 iterations");
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = concentrated(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = concentrated(d);
    }
  }
  const double rho = 0.5 * (lo + hi);

  SarFit fit;
  fit.n = static_cast<int>(n);
  fit.k_params = k_params;
  fit.rho = rho;
  Eigen::VectorXd beta = b_o - rho * b_l;
  Eigen::VectorXd e = e_o - rho * e_l;
  fit.sigma2 = e.squaredNorm() / nd;
  fit.loglik = concentrated(rho);
  fit.aic = 2.0 * k_params - 2.0 * fit.loglik;

  // Central-difference Hessian of the full log-likelihood over (rho, beta, sigma2).
  const Eigen::Index dim = n_coef + 2;
  auto full_ll = [&](const Eigen::VectorXd& theta) {
    double r = theta(0);
    double s2 = theta(dim - 1);
    if (s2 <= 0.0) return -std::numeric_limits<double>::infinity();
    double ld;
    try {
      ld = log_det(r);
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
    Eigen::VectorXd u = y - r * wy - D * theta.segment(1, n_coef);
    return -0.5 * nd * std::log(2.0 * std::numbers::pi * s2) + ld -
           u.squaredNorm() / (2.0 * s2);
  };

  Eigen::VectorXd theta(dim);
  theta(0) = rho;
  theta.segment(1, n_coef) = beta;
  theta(dim - 1) = fit.sigma2;
  Eigen::VectorXd h(dim);
  for (Eigen::Index i = 0; i < dim; ++i) h(i) = 1e-4 * std::max(1.0, std::abs(theta(i)));

  const double f0 = full_ll(theta);
  Eigen::MatrixXd hess(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp(i) += h(i);
    tm(i) -= h(i);
    hess(i, i) = (full_ll(tp) - 2.0 * f0 + full_ll(tm)) / (h(i) * h(i));
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      Eigen::VectorXd tpp = theta, tpm = theta, tmp = theta, tmm = theta;
      tpp(i) += h(i);
      tpp(j) += h(j);
      tpm(i) += h(i);
      tpm(j) -= h(j);
      tmp(i) -= h(i);
      tmp(j) += h(j);
      tmm(i) -= h(i);
      tmm(j) -= h(j);
      hess(i, j) = hess(j, i) =
          (full_ll(tpp) - full_ll(tpm) - full_ll(tmp) + full_ll(tmm)) /
          (4.0 * h(i) * h(j));
    }
  }

  Eigen::VectorXd se = Eigen::VectorXd::Constant(dim, std::numeric_limits<double>::quiet_NaN());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(-hess);
  if (hess.allFinite() && lu.isInvertible()) {
    Eigen::MatrixXd cov = lu.inverse();
    for (Eigen::Index i = 0; i < dim; ++i)
      se(i) = cov(i, i) > 0.0 ? std::sqrt(cov(i, i))
                              : std::numeric_limits<double>::quiet_NaN();
  }

  const double df = nd - static_cast<double>(k_params);
  auto fill_inference = [&](Coefficient& cf, double est, double std_err) {
    cf.estimate = est;
    cf.se = std_err;
    if (std::isfinite(std_err) && std_err > 0.0) {
      cf.t = est / std_err;
      cf.p = stats::student_t_two_sided_p(cf.t, df);
    } else {
      cf.t = std::numeric_limits<double>::quiet_NaN();
      cf.p = std::numeric_limits<double>::quiet_NaN();
    }
  };

  fit.coefficients.resize(static_cast<size_t>(n_coef));
  for (Eigen::Index j = 0; j < n_coef; ++j) {
    Coefficient& cf = fit.coefficients[static_cast<size_t>(j)];
    cf.name = j == 0 ? "intercept" : names[static_cast<size_t>(j - 1)];
    fill_inference(cf, beta(j), se(1 + j));
  }
  Coefficient rc;
  fill_inference(rc, rho, se(0));
  fit.rho_se = rc.se;
  fit.rho_t = rc.t;
  fit.rho_p = rc.p;

  // Reduced-form fitted values: (I - rho W)^-1 D beta.
  Eigen::SparseLU<Eigen::SparseMatrix<double>> slu;
  slu.compute(identity_minus(w, rho));
  if (slu.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalError, "fit_spatial_lag: reduced-form solve failed");
  Eigen::VectorXd fitted = slu.solve(D * beta);

  std::vector<double> yv(y.data(), y.data() + n);
  std::vector<double> fv(fitted.data(), fitted.data() + n);
  double var_y = (y.array() - y.mean()).square().sum();
  double var_f = (fitted.array() - fitted.mean()).square().sum();
  if (var_y > 0.0 && var_f > 0.0) {
    double r = stats::pearson_r(yv, fv);
    fit.r2 = r * r;
    fit.r2_variance_ratio = var_f / var_y;
  } else {
    fit.r2 = 0.0;
    fit.r2_variance_ratio = 0.0;
  }
  return fit;
}

}  // namespace partisan::spatial
