#pragma once

#include <cstddef>
#include <span>

namespace kgrank {

double log_gamma(double x);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Two-sided p-value for a Student-t statistic with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  size_t n = 0;
  bool all_zero_diffs = false;  // a == b everywhere; p fixed to 1
  bool zero_variance = false;   // constant nonzero difference; p -> 0 limit
};

// Paired two-sided t-test over per-query differences a[i] - b[i].
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

}  // namespace kgrank
