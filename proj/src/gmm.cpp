#include "sqe/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sqe {

SampleStats sample_stats(std::span<const double> xs) {
  if (xs.empty()) throw ValidationError("sample_stats requires at least one value");
  double sum = 0.0;
  for (double x : xs) sum += x;
  double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) {
    double d = x - mean;
    ss += d * d;
  }
  return SampleStats{mean, std::sqrt(ss / static_cast<double>(xs.size())),
                     xs.size()};
}

SampleStats sample_stats(const DistanceSamples& xs) { return sample_stats(std::span(xs.values)); }

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;

// Linear-interpolation percentile on a sorted copy, p in [0, 1].
double percentile(std::vector<double> sorted, double p) {
  double h = p * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(h);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct Params {
  std::array<double, 2> mean, var, weight;
};

double log_likelihood_and_resp(std::span<const double> xs, const Params& p,
                               std::vector<double>* r2_out) {
  const double lw1 = std::log(p.weight[0]);
  const double lw2 = std::log(p.weight[1]);
  const double lv1 = std::log(p.var[0]);
  const double lv2 = std::log(p.var[1]);
  double ll = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double d1 = xs[i] - p.mean[0];
    double d2 = xs[i] - p.mean[1];
    double la = lw1 - 0.5 * (kLogTwoPi + lv1 + d1 * d1 / p.var[0]);
    double lb = lw2 - 0.5 * (kLogTwoPi + lv2 + d2 * d2 / p.var[1]);
    double hi = std::max(la, lb);
    double e = std::exp(std::min(la, lb) - hi);
    ll += hi + std::log1p(e);
    if (r2_out) {
      // r2 = exp(lb) / (exp(la) + exp(lb))
      (*r2_out)[i] = la >= lb ? e / (1.0 + e) : 1.0 / (1.0 + e);
    }
  }
  return ll;
}

GmmFit degenerate_fit(std::span<const double> xs, double value, const GmmOptions& opts) {
  GmmFit fit;
  fit.mean = {value, value};
  fit.var = {opts.var_floor, opts.var_floor};
  fit.weight = {0.5, 0.5};
  Params p{fit.mean, fit.var, fit.weight};
  fit.log_likelihood = log_likelihood_and_resp(xs, p, nullptr);
  fit.loglik_history = {fit.log_likelihood};
  fit.converged = true;
  return fit;
}

}  // namespace

GmmFit fit_gmm2(std::span<const double> xs, const GmmOptions& opts) {
  if (xs.size() < kMinFitSamples) {
    throw ValidationError("fit_gmm2 requires at least " +
                          std::to_string(kMinFitSamples) + " samples, got " +
                          std::to_string(xs.size()));
  }

  auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  if (*mn == *mx) return degenerate_fit(xs, *mn, opts);
  auto overall = sample_stats(xs);

  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  Params p;
  p.mean = {percentile(sorted, 0.25), percentile(std::move(sorted), 0.75)};
  double var0 = std::max(overall.std * overall.std / 4.0, opts.var_floor);
  p.var = {var0, var0};
  p.weight = {0.5, 0.5};

  GmmFit fit;
  std::vector<double> r2(xs.size());
  double ll = log_likelihood_and_resp(xs, p, &r2);
  fit.loglik_history.push_back(ll);

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    // M-step from the responsibilities of the current parameters.
    double s2 = 0.0, sx2 = 0.0, sxx2 = 0.0, sx1 = 0.0, sxx1 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double r = r2[i];
      s2 += r;
      sx2 += r * xs[i];
      sxx2 += r * xs[i] * xs[i];
      sx1 += (1.0 - r) * xs[i];
      sxx1 += (1.0 - r) * xs[i] * xs[i];
    }
    double n = static_cast<double>(xs.size());
    double s1 = n - s2;
    Params next = p;
    if (s1 > 0.0) {
      next.mean[0] = sx1 / s1;
      next.var[0] = std::max(sxx1 / s1 - next.mean[0] * next.mean[0], opts.var_floor);
    }
    if (s2 > 0.0) {
      next.mean[1] = sx2 / s2;
      next.var[1] = std::max(sxx2 / s2 - next.mean[1] * next.mean[1], opts.var_floor);
    }
    next.weight = {s1 / n, s2 / n};

    double ll_next = log_likelihood_and_resp(xs, next, &r2);
    // The variance floor can clamp an update; never record a decrease.
    if (ll_next < ll - 1e-12) {
      fit.converged = true;
      break;
    }
    p = next;
    fit.iterations = iter;
    fit.loglik_history.push_back(ll_next);
    if (ll_next - ll < opts.tol) {
      ll = ll_next;
      fit.converged = true;
      break;
    }
    ll = ll_next;
  }

  if (p.mean[0] > p.mean[1]) {
    std::swap(p.mean[0], p.mean[1]);
    std::swap(p.var[0], p.var[1]);
    std::swap(p.weight[0], p.weight[1]);
  }
  fit.mean = p.mean;
  fit.var = p.var;
  fit.weight = p.weight;
  fit.log_likelihood = fit.loglik_history.back();
  return fit;
}

GmmFit fit_gmm2(const DistanceSamples& xs, const GmmOptions& opts) {
  return fit_gmm2(std::span(xs.values), opts);
}

double mean_gap(const GmmFit& fit) { return fit.mean[1] - fit.mean[0]; }

std::array<double, 2> responsibilities(const GmmFit& fit, double x) {
  double d1 = x - fit.mean[0];
  double d2 = x - fit.mean[1];
  double la = std::log(fit.weight[0]) -
              0.5 * (kLogTwoPi + std::log(fit.var[0]) + d1 * d1 / fit.var[0]);
  double lb = std::log(fit.weight[1]) -
              0.5 * (kLogTwoPi + std::log(fit.var[1]) + d2 * d2 / fit.var[1]);
  double hi = std::max(la, lb);
  double e = std::exp(std::min(la, lb) - hi);
  double r_lo = e / (1.0 + e);      // responsibility of the smaller logit
  double r_hi = 1.0 / (1.0 + e);
  if (la >= lb) return {r_hi, r_lo};
  return {r_lo, r_hi};
}

}  // namespace sqe
