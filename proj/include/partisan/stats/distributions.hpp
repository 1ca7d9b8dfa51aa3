#pragma once

namespace partisan::stats {

// Regularized incomplete beta function I_x(a, b), continued fraction
// evaluation (Lentz); relative accuracy ~1e-13 over the range used here.
double incomplete_beta(double a, double b, double x);

// Two-sided tail probability P(|T_df| >= |t|) for Student's t. Degrees of
// freedom may be fractional (Welch). Values below ~1e-300 are not flushed
// to zero.
double student_t_two_sided_p(double t, double df);

}  // namespace partisan::stats
