#include "partisan/learn/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "partisan/common/error.hpp"

namespace partisan::learn {

ShapExplanation shapley_values(const PredictFn& f, const Eigen::RowVectorXd& x,
                               const Eigen::MatrixXd& background) {
  const int m = static_cast<int>(x.size());
  if (m < 1) throw Error(ErrorCode::Validation, "shapley_values: no features");
  if (m > 12)
    throw Error(ErrorCode::TooManyFeatures,
                "shapley_values: " + std::to_string(m) +
                    " features exceed the exact-enumeration cap of 12; reduce features");
  if (background.rows() < 1)
    throw Error(ErrorCode::Validation, "shapley_values: empty background");
  if (background.cols() != m)
    throw Error(ErrorCode::Validation, "shapley_values: background width mismatch");

  const uint32_t n_masks = 1u << m;
  const Eigen::Index b_rows = background.rows();
  std::vector<double> v(n_masks);
  Eigen::RowVectorXd blended(m);
  for (uint32_t mask = 0; mask < n_masks; ++mask) {
    double acc = 0.0;
    for (Eigen::Index b = 0; b < b_rows; ++b) {
      for (int j = 0; j < m; ++j)
        blended(j) = (mask >> j & 1u) ? x(j) : background(b, j);
      acc += f(blended);
    }
    v[mask] = acc / static_cast<double>(b_rows);
  }

  // weight(s) = s! (m-1-s)! / m!
  std::vector<double> weight(static_cast<size_t>(m));
  for (int s = 0; s < m; ++s) {
    double w = 1.0;
    for (int i = 1; i <= s; ++i) w *= i;
    for (int i = 1; i <= m - 1 - s; ++i) w *= i;
    for (int i = 1; i <= m; ++i) w /= i;
    weight[static_cast<size_t>(s)] = w;
  }

  ShapExplanation out;
  out.phi.assign(static_cast<size_t>(m), 0.0);
  out.base = v[0];
  out.prediction = v[n_masks - 1];
  for (int j = 0; j < m; ++j) {
    const uint32_t bit = 1u << j;
    double phi = 0.0;
    for (uint32_t mask = 0; mask < n_masks; ++mask) {
      if (mask & bit) continue;
      phi += weight[static_cast<size_t>(std::popcount(mask))] * (v[mask | bit] - v[mask]);
    }
    out.phi[static_cast<size_t>(j)] = phi;
  }
  return out;
}

std::vector<std::pair<std::string, double>> mean_abs_shap(
    const std::vector<ShapExplanation>& explanations,
    const std::vector<std::string>& names) {
  if (explanations.empty())
    throw Error(ErrorCode::Validation, "mean_abs_shap: no explanations");
  const size_t m = names.size();
  for (const auto& e : explanations)
    if (e.phi.size() != m)
      throw Error(ErrorCode::Validation, "mean_abs_shap: feature count mismatch");

  std::vector<std::pair<std::string, double>> out(m);
  for (size_t j = 0; j < m; ++j) {
    double acc = 0.0;
    for (const auto& e : explanations) acc += std::abs(e.phi[j]);
    out[j] = {names[j], acc / static_cast<double>(explanations.size())};
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

}  // namespace partisan::learn
