#include "sqe/metric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "sqe/numfmt.hpp"

namespace sqe {

void SqeParams::validate() const {
  if (!(delta_L > 0.0 && delta_D > 0.0 && delta_m > 0.0 && k1 > 0.0 && k2 > 0.0)) {
    throw ValidationError("all SQE parameters must be strictly positive");
  }
}

double sqe_score(std::size_t n, double mean_len, std::size_t fp, std::size_t dif,
                 std::size_t sim, const SqeParams& p) {
  if (n == 0) return 0.0;
  double nn = static_cast<double>(n);
  double errors = static_cast<double>(fp + dif + sim);
  return nn * mean_len / (nn + p.k1 * mean_len + p.k2 * errors);
}

TrajectoryVerdict classify_trajectory(const Trajectory& t, const SqeParams& p,
                                      const EvalOptions& opts) {
  p.validate();
  TrajectoryVerdict v;
  v.id = t.id;
  v.length = t.length();

  auto samples = intra_distances(t, PairSampling{opts.max_pairs, opts.seed});
  // No intra samples: no identity evidence, so Std is taken as +inf.
  double std_dev = samples.values.empty()
                       ? std::numeric_limits<double>::infinity()
                       : sample_stats(samples).std;

  if (static_cast<double>(v.length) < p.delta_L && std_dev > p.delta_D) {
    v.false_alarm = true;
    return v;
  }
  if (samples.values.size() < kMinFitSamples) return v;

  auto fit = fit_gmm2(samples);
  v.intra_mean_gap = mean_gap(fit);
  v.flagged_dif = *v.intra_mean_gap > p.delta_m;
  return v;
}

bool classify_pair(const Trajectory& a, const Trajectory& b, const SqeParams& p,
                   const EvalOptions& opts) {
  p.validate();
  auto samples = inter_distances(a, b, PairSampling{opts.max_pairs, opts.seed});
  if (samples.values.size() < kMinFitSamples) return false;
  return mean_gap(fit_gmm2(samples)) > p.delta_m;
}

SqeReport evaluate(const TrackSet& ts, const SqeParams& p, const EvalOptions& opts) {
  p.validate();
  SqeReport report;
  report.n = ts.size();
  if (report.n == 0) return report;
  report.mean_len = mean_length(ts);

  // Id order makes the output independent of trajectory order in the set.
  std::vector<const Trajectory*> order;
  order.reserve(ts.size());
  for (const auto& t : ts.trajectories) order.push_back(&t);
  std::sort(order.begin(), order.end(),
            [](const Trajectory* a, const Trajectory* b) { return a->id < b->id; });

  std::vector<const Trajectory*> clean;
  for (const Trajectory* t : order) {
    auto v = classify_trajectory(*t, p, opts);
    if (v.false_alarm) {
      ++report.fp;
    } else {
      if (v.flagged_dif) ++report.dif;
      clean.push_back(t);
    }
    report.verdicts.push_back(std::move(v));
  }

  for (std::size_t i = 0; i + 1 < clean.size(); ++i) {
    for (std::size_t j = i + 1; j < clean.size(); ++j) {
      if (opts.overlap_pairs_only && !clean[i]->overlaps_in_time(*clean[j])) continue;
      if (classify_pair(*clean[i], *clean[j], p, opts)) {
        ++report.sim;
        report.sim_pairs.emplace_back(clean[i]->id, clean[j]->id);
      }
    }
  }

  report.sqe = sqe_score(report.n, report.mean_len, report.fp, report.dif,
                         report.sim, p);
  return report;
}

ErrorEstimate split_from_pair_count(std::int64_t length, std::int64_t pair_count) {
  if (length < 0 || pair_count < 0) {
    throw ValidationError("split_from_pair_count needs non-negative inputs");
  }
  double L = static_cast<double>(length);
  double disc = L * L - 4.0 * static_cast<double>(pair_count);
  if (disc < 0.0) {
    throw InfeasibleEstimateError(
        "no real segment split: pair count " + std::to_string(pair_count) +
        " exceeds (L/2)^2 for L = " + std::to_string(length));
  }
  double root = (L + std::sqrt(disc)) / 2.0;
  // Candidate integer splits around the real root; pick the product
  // closest to pair_count, then the candidate closest to the root.
  std::int64_t lo = static_cast<std::int64_t>(std::floor(root));
  ErrorEstimate best;
  double best_err = std::numeric_limits<double>::infinity();
  double best_dist = 0.0;
  for (std::int64_t cand : {lo, lo + 1}) {
    std::int64_t n1 = std::clamp<std::int64_t>(cand, (length + 1) / 2, length);
    std::int64_t n2 = length - n1;
    double err = std::abs(static_cast<double>(n1 * n2 - pair_count));
    double dist = std::abs(static_cast<double>(n1) - root);
    if (err < best_err || (err == best_err && dist < best_dist)) {
      best_err = err;
      best_dist = dist;
      best = ErrorEstimate{n1, n2, n1, n2};
    }
  }
  return best;
}

ErrorEstimate estimate_errors(const Trajectory& t, const GmmFit& fit) {
  auto samples = intra_distances(t, PairSampling::unlimited());
  std::int64_t heavy = 0;
  for (double x : samples.values) {
    if (responsibilities(fit, x)[1] > 0.5) ++heavy;
  }
  // Length counts the feature-bearing detections the pair count refers to.
  std::int64_t n_feat = 0;
  for (const auto& d : t.detections) {
    if (d.has_feature()) ++n_feat;
  }
  return split_from_pair_count(n_feat, heavy);
}

void write_report_text(const SqeReport& report, const std::filesystem::path& path) {
  std::string out;
  out += "n = " + std::to_string(report.n) + "\n";
  out += "L = " + format_double(report.mean_len) + "\n";
  out += "fp = " + std::to_string(report.fp) + "\n";
  out += "dif = " + std::to_string(report.dif) + "\n";
  out += "sim = " + std::to_string(report.sim) + "\n";
  out += "sqe = " + format_double(report.sqe) + "\n";
  out += "sim_pairs =";
  for (const auto& [a, b] : report.sim_pairs) {
    out += " " + std::to_string(a) + ":" + std::to_string(b);
  }
  out += "\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open report file: " + path.string());
  f << out;
}

void write_verdicts_csv(const SqeReport& report, const std::filesystem::path& path) {
  std::string out = "id,length,false_alarm,mean_gap,dif\n";
  for (const auto& v : report.verdicts) {
    out += std::to_string(v.id) + "," + std::to_string(v.length) + ",";
    out += v.false_alarm ? "1," : "0,";
    if (v.intra_mean_gap) append_double(out, *v.intra_mean_gap);
    out += v.flagged_dif ? ",1\n" : ",0\n";
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open verdicts file: " + path.string());
  f << out;
}

}  // namespace sqe
