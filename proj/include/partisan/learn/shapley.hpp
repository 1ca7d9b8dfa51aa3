#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace partisan::learn {

struct ShapExplanation {
  std::vector<double> phi;  // per-feature attribution
  double base = 0.0;        // mean model output over the background
  double prediction = 0.0;  // f(x); equals base + sum(phi) up to float error
};

using PredictFn = std::function<double(const Eigen::RowVectorXd&)>;

// Exact interventional Shapley values over all 2^M coalitions:
// v(S) = mean over background rows b of f(x restricted to S, b elsewhere).
ShapExplanation shapley_values(const PredictFn& f, const Eigen::RowVectorXd& x,
                               const Eigen::MatrixXd& background);

// Mean |phi_j| across explanations, sorted descending (ties by name).
std::vector<std::pair<std::string, double>> mean_abs_shap(
    const std::vector<ShapExplanation>& explanations,
    const std::vector<std::string>& names);

}  // namespace partisan::learn
