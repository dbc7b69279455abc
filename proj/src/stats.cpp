#include "kgrank/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "kgrank/common.hpp"

namespace kgrank {

double log_gamma(double x) {
  // Lanczos approximation, g = 7.
  static const double coeff[9] = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // Reflection formula.
    return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
  }
  x -= 1.0;
  double a = coeff[0];
  double t = x + 7.5;
  for (int i = 1; i < 9; ++i) a += coeff[i] / (x + i);
  return 0.5 * std::log(2.0 * M_PI) + (x + 0.5) * std::log(t) - t + std::log(a);
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;

  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) {
    throw std::domain_error("incomplete_beta: x outside [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double ln_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                    a * std::log(x) + b * std::log(1.0 - x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
  if (std::isinf(t)) return 0.0;
  double x = dof / (dof + t * t);
  return incomplete_beta(dof / 2.0, 0.5, x);
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("paired_ttest: length mismatch");
  }
  if (a.size() < 2) {
    throw ValidationError("paired_ttest: need at least 2 paired values");
  }
  const size_t n = a.size();
  double mean = 0.0;
  for (size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  bool any_nonzero = false;
  for (size_t i = 0; i < n; ++i) {
    double d = a[i] - b[i];
    if (d != 0.0) any_nonzero = true;
    ss += (d - mean) * (d - mean);
  }

  TTestResult res;
  res.n = n;
  if (!any_nonzero) {
    res.all_zero_diffs = true;
    res.t = 0.0;
    res.p = 1.0;
    return res;
  }
  double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) {
    res.zero_variance = true;
    res.t = mean > 0 ? std::numeric_limits<double>::infinity()
                     : -std::numeric_limits<double>::infinity();
    res.p = 0.0;
    return res;
  }
  res.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  res.p = student_t_two_sided_p(res.t, static_cast<double>(n - 1));
  return res;
}

}  // namespace kgrank
