#include "partisan/learn/elastic_net.hpp"

#include <algorithm>
#include <cmath>

#include "partisan/common/rng.hpp"

namespace partisan::learn {

double ElasticNetFit::predict(const Eigen::RowVectorXd& x) const {
  double out = intercept;
  for (size_t j = 0; j < coefficients.size(); ++j)
    out += coefficients[j] * x(static_cast<Eigen::Index>(j));
  return out;
}

Eigen::VectorXd ElasticNetFit::predict(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::RowVectorXd row = X.row(i);
    out(i) = predict(row);
  }
  return out;
}

namespace {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

double r_squared(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
  double tss = (y.array() - y.mean()).square().sum();
  if (tss <= 0.0) return 0.0;
  double rss = (y - yhat).squaredNorm();
  return 1.0 - rss / tss;
}

}  // namespace

ElasticNetFit fit_elastic_net(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                              const std::vector<std::string>& names, double alpha,
                              double l1_ratio, double tol, int max_iter) {
  const Eigen::Index n = y.size();
  const Eigen::Index p = X.cols();
  if (X.rows() != n)
    throw Error(ErrorCode::Validation, "fit_elastic_net: X rows do not match y length");
  if (static_cast<Eigen::Index>(names.size()) != p)
    throw Error(ErrorCode::Validation, "fit_elastic_net: name count does not match X");
  if (alpha < 0.0)
    throw Error(ErrorCode::Validation, "fit_elastic_net: alpha must be >= 0");
  if (l1_ratio < 0.0 || l1_ratio > 1.0)
    throw Error(ErrorCode::Validation, "fit_elastic_net: l1_ratio must be in [0,1]");
  if (n < 2)
    throw Error(ErrorCode::Validation, "fit_elastic_net: need at least two rows");

  const double nd = static_cast<double>(n);
  Eigen::VectorXd mean(p), sd(p);
  Eigen::MatrixXd xs(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    mean(j) = X.col(j).mean();
    double var = (X.col(j).array() - mean(j)).square().sum() / nd;
    if (var <= 0.0)
      throw Error(ErrorCode::Validation,
                  "fit_elastic_net: feature " + names[static_cast<size_t>(j)] +
                      " has zero variance");
    sd(j) = std::sqrt(var);
    xs.col(j) = (X.col(j).array() - mean(j)) / sd(j);
  }
  const double y_mean = y.mean();
  Eigen::VectorXd yc = y.array() - y_mean;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd resid = yc;
  const double denom = 1.0 + alpha * (1.0 - l1_ratio);
  const double gamma = alpha * l1_ratio;

  auto assemble = [&](int iterations) {
    ElasticNetFit fit;
    fit.names = names;
    fit.alpha = alpha;
    fit.l1_ratio = l1_ratio;
    fit.iterations = iterations;
    fit.std_coefficients.resize(static_cast<size_t>(p));
    fit.coefficients.resize(static_cast<size_t>(p));
    double shift = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      fit.std_coefficients[static_cast<size_t>(j)] = beta(j);
      fit.coefficients[static_cast<size_t>(j)] = beta(j) / sd(j);
      shift += fit.coefficients[static_cast<size_t>(j)] * mean(j);
    }
    fit.intercept = y_mean - shift;
    fit.train_r2 = r_squared(y, fit.predict(X));
    return fit;
  };

  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      double old = beta(j);
      double z = xs.col(j).dot(resid) / nd + old;
      double next = soft_threshold(z, gamma) / denom;
      if (next != old) {
        resid -= (next - old) * xs.col(j);
        beta(j) = next;
        max_change = std::max(max_change, std::abs(next - old));
      }
    }
    if (max_change < tol) return assemble(sweep);
  }
  throw ElasticNetConvergenceError(
      "fit_elastic_net: no convergence within " + std::to_string(max_iter) + " sweeps",
      assemble(max_iter));
}

std::pair<std::vector<int>, std::vector<int>> train_test_split(int n, double ratio,
                                                               uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw Error(ErrorCode::Validation, "train_test_split: ratio must be in (0,1)");
  if (n < 2)
    throw Error(ErrorCode::Validation, "train_test_split: need at least two rows");
  std::vector<int> idx(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
  Rng rng(seed);
  rng.shuffle(idx);
  auto n_train = static_cast<size_t>(std::floor(ratio * static_cast<double>(n)));
  std::vector<int> train(idx.begin(), idx.begin() + static_cast<long>(n_train));
  std::vector<int> test(idx.begin() + static_cast<long>(n_train), idx.end());
  return {std::move(train), std::move(test)};
}

CvResult cv_grid_search(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                        const std::vector<std::string>& names,
                        const std::vector<double>& alphas,
                        const std::vector<double>& l1_ratios, int k, uint64_t seed,
                        double tol, int max_iter) {
  const int n = static_cast<int>(y.size());
  if (k < 2) throw Error(ErrorCode::Validation, "cv_grid_search: need k >= 2 folds");
  if (alphas.empty() || l1_ratios.empty())
    throw Error(ErrorCode::Validation, "cv_grid_search: empty grid");
  if (n / k < 2)
    throw Error(ErrorCode::Validation, "cv_grid_search: a fold would have fewer than 2 rows");

  std::vector<int> idx(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
  Rng rng(seed);
  rng.shuffle(idx);

  // Contiguous chunks of the shuffled order; the first n % k folds get one extra.
  std::vector<std::vector<int>> folds(static_cast<size_t>(k));
  int base = n / k, extra = n % k, pos = 0;
  for (int f = 0; f < k; ++f) {
    int len = base + (f < extra ? 1 : 0);
    folds[static_cast<size_t>(f)].assign(idx.begin() + pos, idx.begin() + pos + len);
    pos += len;
  }

  auto subset = [&](const std::vector<int>& rows, Eigen::VectorXd& ys, Eigen::MatrixXd& xsub) {
    ys.resize(static_cast<Eigen::Index>(rows.size()));
    xsub.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (size_t i = 0; i < rows.size(); ++i) {
      ys(static_cast<Eigen::Index>(i)) = y(rows[i]);
      xsub.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
    }
  };

  CvResult result;
  bool have_best = false;
  double best_score = 0.0;
  for (double alpha : alphas) {
    for (double l1 : l1_ratios) {
      double sum_r2 = 0.0;
      for (int f = 0; f < k; ++f) {
        std::vector<int> train_rows;
        for (int g = 0; g < k; ++g)
          if (g != f)
            train_rows.insert(train_rows.end(), folds[static_cast<size_t>(g)].begin(),
                              folds[static_cast<size_t>(g)].end());
        Eigen::VectorXd ytr, yte;
        Eigen::MatrixXd xtr, xte;
        subset(train_rows, ytr, xtr);
        subset(folds[static_cast<size_t>(f)], yte, xte);
        ElasticNetFit fit = fit_elastic_net(ytr, xtr, names, alpha, l1, tol, max_iter);
        sum_r2 += r_squared(yte, fit.predict(xte));
      }
      double score = sum_r2 / static_cast<double>(k);
      result.cells.push_back({alpha, l1, score});
      bool better = !have_best || score > best_score ||
                    (score == best_score &&
                     (alpha < result.best_alpha ||
                      (alpha == result.best_alpha && l1 < result.best_l1_ratio)));
      if (better) {
        have_best = true;
        best_score = score;
        result.best_alpha = alpha;
        result.best_l1_ratio = l1;
      }
    }
  }
  result.fit = fit_elastic_net(y, X, names, result.best_alpha, result.best_l1_ratio, tol,
                               max_iter);
  return result;
}

}  // namespace partisan::learn
