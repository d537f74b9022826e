// Two-component one-dimensional Gaussian mixture fitted by EM, plus the
// summary statistics thresholded by the self-evaluation algorithm.
//
// Initialization is deterministic (25th/75th percentile means, quarter of
// the overall variance, equal weights), so identical inputs always produce
// bit-identical fits.
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "sqe/distance.hpp"

namespace sqe {

struct SampleStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::size_t count = 0;
};

/// Mean and population standard deviation. Throws on empty input.
SampleStats sample_stats(std::span<const double> xs);
SampleStats sample_stats(const DistanceSamples& xs);

struct GmmOptions {
  double tol = 1e-6;        // absolute log-likelihood improvement
  int max_iter = 200;
  double var_floor = 1e-8;
};

// Fewer samples than this cannot support a two-component fit.
inline constexpr std::size_t kMinFitSamples = 4;

struct GmmFit {
  std::array<double, 2> mean{};    // ascending
  std::array<double, 2> var{};
  std::array<double, 2> weight{};  // sums to 1
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loglik_history;  // non-decreasing
};

/// EM fit of a 2-component 1-D Gaussian mixture. Components are returned in
/// ascending-mean order. All-identical inputs yield a degenerate fit with
/// both means at the value (not an error). Throws when count < kMinFitSamples.
GmmFit fit_gmm2(std::span<const double> xs, const GmmOptions& opts = {});
GmmFit fit_gmm2(const DistanceSamples& xs, const GmmOptions& opts = {});

/// mu_2 - mu_1 >= 0; the bimodality statistic thresholded by delta_m.
double mean_gap(const GmmFit& fit);

/// Posterior responsibilities (r1, r2) of the two components at x; r1 + r2 = 1.
std::array<double, 2> responsibilities(const GmmFit& fit, double x);

}  // namespace sqe
