// Statistical helpers: regularized incomplete gamma, the chi distribution
// CDF, a one-sample Kolmogorov-Smirnov test, and Spearman rank correlation.
#pragma once

#include <cstddef>
#include <span>

namespace sqe {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// CDF of the chi distribution with `dof` degrees of freedom at x >= 0.
double chi_cdf(double x, double dof);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t sample_count = 0;
};

/// One-sample KS test of `samples` against the chi CDF with `dof` degrees
/// of freedom; asymptotic p-value.
KsResult ks_test_chi(std::span<const double> samples, double dof);

/// Spearman rank correlation with average ranks for ties. Returns 0 when
/// either input is constant.
double spearman_rho(std::span<const double> xs, std::span<const double> ys);

}  // namespace sqe
