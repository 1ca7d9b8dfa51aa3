#include "partisan/stats/tests.hpp"

#include <cmath>

#include "partisan/common/error.hpp"
#include "partisan/stats/distributions.hpp"

namespace partisan::stats {

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // sample variance, ddof = 1
  size_t n = 0;
};

Moments moments(std::span<const double> v, const char* name) {
  if (v.size() < 2)
    throw Error(ErrorCode::Validation,
                std::string(name) + " needs at least 2 observations");
  Moments m;
  m.n = v.size();
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(m.n);
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(m.n - 1);
  return m;
}

}  // namespace

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "ns";
}

TestResult t_test_pooled(std::span<const double> a, std::span<const double> b) {
  Moments ma = moments(a, "sample a");
  Moments mb = moments(b, "sample b");
  double na = static_cast<double>(ma.n), nb = static_cast<double>(mb.n);
  double df = na + nb - 2.0;
  double pooled = ((na - 1.0) * ma.var + (nb - 1.0) * mb.var) / df;
  TestResult r;
  r.df = df;
  if (pooled <= 0.0) {
    if (ma.mean == mb.mean) {
      r.t = 0.0;
      r.p = 1.0;
      r.stars = significance_stars(r.p);
      return r;
    }
    throw Error(ErrorCode::DegenerateVariance,
                "zero pooled variance with unequal means");
  }
  r.t = (ma.mean - mb.mean) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  r.p = student_t_two_sided_p(r.t, df);
  r.stars = significance_stars(r.p);
  return r;
}

TestResult t_test_welch(std::span<const double> a, std::span<const double> b) {
  Moments ma = moments(a, "sample a");
  Moments mb = moments(b, "sample b");
  if (ma.var <= 0.0 || mb.var <= 0.0)
    throw Error(ErrorCode::DegenerateVariance,
                "Welch's t requires positive variance in both samples");
  double na = static_cast<double>(ma.n), nb = static_cast<double>(mb.n);
  double sa = ma.var / na, sb = mb.var / nb;
  TestResult r;
  r.t = (ma.mean - mb.mean) / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  r.p = student_t_two_sided_p(r.t, r.df);
  r.stars = significance_stars(r.p);
  return r;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::Validation, "pearson_r requires equal lengths");
  if (x.size() < 2)
    throw Error(ErrorCode::Validation, "pearson_r needs at least 2 points");
  size_t n = x.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw Error(ErrorCode::DegenerateVariance, "pearson_r: zero variance input");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace partisan::stats
