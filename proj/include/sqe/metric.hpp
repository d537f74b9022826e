// Self quality evaluation: per-trajectory false-alarm / bimodality
// classification, pairwise similarity flags, and the aggregate score
//
//   SQE = (n * L) / (n + k1 * L + k2 * (fp + dif + sim))
//
// computed from a track set alone, without ground truth.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "sqe/gmm.hpp"
#include "sqe/types.hpp"

namespace sqe {

struct SqeParams {
  double delta_L = 15.0;  // short-trajectory length threshold (frames)
  double delta_D = 0.2;   // intra-distance std threshold for false alarms
  double delta_m = 0.3;   // GMM mean-gap threshold for dif / sim
  double k1 = 1.0;
  double k2 = 2.0;

  void validate() const;
};

struct EvalOptions {
  std::uint64_t seed = 0;
  std::size_t max_pairs = 10000;
  // Restrict sim checks to temporally overlapping pairs. Off by default:
  // the algorithm pairs all non-false-alarm trajectories.
  bool overlap_pairs_only = false;
};

struct TrajectoryVerdict {
  std::int64_t id = 0;
  std::size_t length = 0;
  bool false_alarm = false;
  std::optional<double> intra_mean_gap;  // absent when no GMM was fitted
  bool flagged_dif = false;
};

struct SqeReport {
  std::size_t n = 0;
  double mean_len = 0.0;
  std::size_t fp = 0;
  std::size_t dif = 0;
  std::size_t sim = 0;
  double sqe = 0.0;
  std::vector<TrajectoryVerdict> verdicts;               // sorted by id
  std::vector<std::pair<std::int64_t, std::int64_t>> sim_pairs;  // sorted
};

/// Eq. 9 arithmetic on raw counts (n = 0 yields 0).
double sqe_score(std::size_t n, double mean_len, std::size_t fp, std::size_t dif,
                 std::size_t sim, const SqeParams& p);

/// Lines 5-12 of the evaluation loop for one trajectory: short tracks with
/// large intra-distance std are false alarms; otherwise a 2-class GMM is
/// fitted and a mean gap above delta_m flags dif. Trajectories with fewer
/// than kMinFitSamples intra pairs skip the fit and are never flagged dif;
/// trajectories with no intra samples have Std = +inf.
TrajectoryVerdict classify_trajectory(const Trajectory& t, const SqeParams& p,
                                      const EvalOptions& opts = {});

/// Pairwise check over inter distances; true when the fitted mean gap
/// exceeds delta_m. Pairs with fewer than kMinFitSamples samples are never
/// flagged. Callers must not pass false-alarm trajectories.
bool classify_pair(const Trajectory& a, const Trajectory& b, const SqeParams& p,
                   const EvalOptions& opts = {});

/// Full evaluation of a track set. Deterministic for a fixed seed and
/// invariant to trajectory order. An empty set yields sqe = 0.
SqeReport evaluate(const TrackSet& ts, const SqeParams& p, const EvalOptions& opts = {});

// ---------------------------------------------------------------------------
// Erroneous-frame estimation for a trajectory flagged dif: with segment
// lengths n1 + n2 = L and cross-pair count n1 * n2 = N, the identity-switch
// split is recovered from the size of the larger-mean distance class.

struct ErrorEstimate {
  std::int64_t n1 = 0;  // n1 >= n2
  std::int64_t n2 = 0;
  std::int64_t idtp = 0;  // = n1
  std::int64_t idfp = 0;  // = n2
};

/// Solves n1 + n2 = length, n1 * n2 = pair_count, rounding to the integer
/// split whose product is closest to pair_count. Throws
/// InfeasibleEstimateError when pair_count > length^2 / 4.
ErrorEstimate split_from_pair_count(std::int64_t length, std::int64_t pair_count);

/// Applies split_from_pair_count to a fitted trajectory: N is the number of
/// intra distances assigned (responsibility > 0.5) to the larger-mean
/// component, with subsampling disabled.
ErrorEstimate estimate_errors(const Trajectory& t, const GmmFit& fit);

// Report serialization: a key-value text report and a CSV of per-trajectory
// verdicts (header: id,length,false_alarm,mean_gap,dif).
void write_report_text(const SqeReport& report, const std::filesystem::path& path);
void write_verdicts_csv(const SqeReport& report, const std::filesystem::path& path);

}  // namespace sqe
