#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace partisan::stats {

// Variance inflation factors: VIF_j = 1 / (1 - R2_j) where R2_j regresses
// column j of X on all other columns plus an intercept.
std::vector<double> vif(const Eigen::MatrixXd& X,
                        const std::vector<std::string>& names);

}  // namespace partisan::stats
