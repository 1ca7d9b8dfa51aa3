#pragma once

#include <span>
#include <string>

namespace partisan::stats {

struct TestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  std::string stars;  // "***" p<.001, "**" p<.01, "*" p<.05, "ns" otherwise
};

std::string significance_stars(double p);

// Classic equal-variance two-sample t-test, df = n_a + n_b - 2.
TestResult t_test_pooled(std::span<const double> a, std::span<const double> b);

// Welch's t-test with Welch-Satterthwaite degrees of freedom.
TestResult t_test_welch(std::span<const double> a, std::span<const double> b);

// Product-moment correlation.
double pearson_r(std::span<const double> x, std::span<const double> y);

}  // namespace partisan::stats
