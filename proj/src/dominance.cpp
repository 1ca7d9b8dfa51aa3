#include "partisan/importance/dominance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "partisan/common/error.hpp"

namespace partisan::importance {

namespace {

std::string subset_names(uint32_t mask, const std::vector<std::string>& names) {
  std::string out = "{";
  for (size_t j = 0; j < names.size(); ++j) {
    if (!(mask >> j & 1u)) continue;
    if (out.size() > 1) out += ",";
    out += names[j];
  }
  return out + "}";
}

}  // namespace

DominanceReport dominance_analysis(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                   const std::vector<std::string>& names) {
  const Eigen::Index n = y.size();
  const int p = static_cast<int>(X.cols());
  if (X.rows() != n)
    throw Error(ErrorCode::Validation, "dominance_analysis: X rows do not match y length");
  if (static_cast<int>(names.size()) != p)
    throw Error(ErrorCode::Validation, "dominance_analysis: name count does not match X");
  if (p < 1)
    throw Error(ErrorCode::Validation, "dominance_analysis: need at least one predictor");
  if (p > 20)
    throw Error(ErrorCode::TooManyPredictors,
                "dominance_analysis: p=" + std::to_string(p) + " exceeds the 2^20 subset cap");
  if (n < p + 2)
    throw Error(ErrorCode::Validation, "dominance_analysis: too few rows for the full model");

  const double mean_y = y.mean();
  const double tss = (y.array() - mean_y).square().sum();
  const uint32_t n_masks = 1u << p;

  // Sub-model R^2 by subset bitmask. Rank-deficient subsets are scored by the
  // projection onto their column space, which keeps increments of an all-zero
  // predictor at exactly 0.
  std::vector<double> r2(n_masks, 0.0);
  for (uint32_t mask = 1; mask < n_masks; ++mask) {
    if (tss <= 0.0) continue;
    const int s = std::popcount(mask);
    Eigen::MatrixXd d(n, s + 1);
    d.col(0).setOnes();
    int c = 1;
    for (int j = 0; j < p; ++j)
      if (mask >> j & 1u) d.col(c++) = X.col(j);
    // Complete orthogonal decomposition projects correctly even when the
    // subset is rank deficient (duplicated or all-zero predictors).
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(d);
    double rss = (y - d * cod.solve(y)).squaredNorm();
    double val = 1.0 - rss / tss;
    if (!std::isfinite(val))
      throw Error(ErrorCode::SingularDesign,
                  "dominance_analysis: sub-model " + subset_names(mask, names) +
                      " could not be scored");
    r2[mask] = std::clamp(val, 0.0, 1.0);
  }

  // Level-wise accumulation in ascending bitmask order.
  std::vector<std::vector<double>> level_sum(static_cast<size_t>(p),
                                             std::vector<double>(static_cast<size_t>(p), 0.0));
  std::vector<double> level_count(static_cast<size_t>(p), 0.0);
  for (uint32_t mask = 0; mask < n_masks; ++mask) {
    const int s = std::popcount(mask);
    if (s >= p) continue;
    for (int j = 0; j < p; ++j) {
      if (mask >> j & 1u) continue;
      level_sum[static_cast<size_t>(j)][static_cast<size_t>(s)] +=
          r2[mask | (1u << j)] - r2[mask];
    }
  }
  for (int s = 0; s < p; ++s) {
    // C(p-1, s) subsets of each level exclude any given predictor.
    double c = 1.0;
    for (int i = 0; i < s; ++i) c = c * static_cast<double>(p - 1 - i) / static_cast<double>(i + 1);
    level_count[static_cast<size_t>(s)] = c;
  }

  DominanceReport report;
  report.p = p;
  report.full_model_r2 = r2[n_masks - 1];
  report.rows.resize(static_cast<size_t>(p));
  double total_sum = 0.0;
  for (int j = 0; j < p; ++j) {
    DominanceRow& row = report.rows[static_cast<size_t>(j)];
    row.predictor = names[static_cast<size_t>(j)];
    row.individual = r2[1u << j];
    row.interactional = r2[n_masks - 1] - r2[(n_masks - 1) ^ (1u << j)];
    double level_total = 0.0;
    double partial_sum = 0.0;
    for (int s = 0; s < p; ++s) {
      double mean_s = level_sum[static_cast<size_t>(j)][static_cast<size_t>(s)] /
                      level_count[static_cast<size_t>(s)];
      level_total += mean_s;
      if (s >= 1 && s <= p - 2) partial_sum += mean_s;
    }
    row.total = level_total / static_cast<double>(p);
    row.average_partial = p >= 3 ? partial_sum / static_cast<double>(p - 2)
                                 : std::numeric_limits<double>::quiet_NaN();
    total_sum += row.total;
  }
  for (auto& row : report.rows)
    row.percent = total_sum != 0.0 ? row.total / total_sum * 100.0
                                   : std::numeric_limits<double>::quiet_NaN();
  return report;
}

double combine_dominance_levels(double individual, double average_partial,
                                double interactional, int p) {
  if (p < 3)
    throw Error(ErrorCode::Validation,
                "combine_dominance_levels: p must be >= 3 (no intermediate levels)");
  return (individual + static_cast<double>(p - 2) * average_partial + interactional) /
         static_cast<double>(p);
}

}  // namespace partisan::importance
