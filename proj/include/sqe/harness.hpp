// Parameter optimization: grid sweeps scored by the self-evaluation metric
// (optionally alongside supervised metrics when ground truth is available),
// the alternating two-parameter tuning procedure, and correlation reports.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sqe/metric.hpp"
#include "sqe/refmetrics.hpp"
#include "sqe/tracker.hpp"
#include "sqe/types.hpp"

namespace sqe::harness {

enum class SweptParam { reid, merge };

std::string to_string(SweptParam p);

struct GridSpec {
  SweptParam parameter = SweptParam::reid;
  double start = 0.3;
  double stop = 1.6;
  double step = 0.05;

  /// start, start + step, ... up to stop (inclusive within rounding).
  std::vector<double> values() const;
};

struct SweepRow {
  double value = 0.0;
  double sqe = 0.0;
  std::size_t n = 0;
  double mean_len = 0.0;
  std::size_t fp = 0, dif = 0, sim = 0;
  // Supervised columns, present when ground truth was given.
  std::optional<double> idf1, idp, idr, mota, motp;
  std::optional<std::int64_t> fn_boxes, fp_boxes, ids;
};

struct SweepResult {
  SweptParam parameter = SweptParam::reid;
  std::vector<SweepRow> rows;  // grid order
  double argmax_sqe = 0.0;
  std::optional<double> argmax_idf1;

  bool has_supervised() const { return argmax_idf1.has_value(); }
};

struct SweepOptions {
  std::uint64_t seed = 0;
  std::size_t max_pairs = 10000;
  int threads = 1;
  double iou_threshold = 0.5;
};

/// Runs the tracker and evaluates the metric at every grid value; the swept
/// field of `fixed` is overridden per point. Per-point randomness is seeded
/// from (seed, parameter value); grid points are independent and may be
/// evaluated concurrently, with rows always emitted in grid order. Argmax
/// ties break toward the smaller parameter value.
SweepResult sweep(const DetectionStream& stream, const GridSpec& grid,
                  const TrackerConfig& fixed, const SqeParams& params,
                  const GroundTruth* gt = nullptr, const SweepOptions& opts = {});

struct TuneGrids {
  GridSpec reid{SweptParam::reid, 0.3, 1.6, 0.05};
  GridSpec merge{SweptParam::merge, 0.5, 1.5, 0.05};
};

struct TuneParams {
  SqeParams base;          // k2 field ignored; the per-sweep values below apply
  double k2_reid = 2.0;
  double k2_merge = 10.0;
};

struct TuneOutcome {
  TrackerConfig baseline;
  TrackerConfig customized;
  struct Round {
    double reid_argmax = 0.0;
    double merge_argmax = 0.0;
  };
  std::vector<Round> rounds;
};

/// Starting from the baseline, alternately sweeps the REID threshold (merge
/// fixed) and the merging threshold (reid fixed), adopting the SQE argmax
/// each time; repeated `rounds` times.
TuneOutcome tune_alternating(const DetectionStream& stream, const TrackerConfig& baseline,
                             const TuneGrids& grids, const TuneParams& params,
                             int rounds = 1, const SweepOptions& opts = {});

struct CorrelationRow {
  std::string name;
  double argmax_sqe = 0.0;
  double argmax_idf1 = 0.0;
  double delta_param = 0.0;        // |argmax_sqe - argmax_idf1|
  double idf1_best = 0.0;
  double idf1_at_sqe = 0.0;
  double delta_idf1_points = 0.0;  // (idf1_best - idf1_at_sqe) * 100, >= 0
  double spearman_rho = 0.0;       // rank correlation of sqe vs idf1 columns
};

struct CorrelationSummary {
  std::vector<CorrelationRow> rows;
  double frac_param_within_quarter = 0.0;  // delta_param <= 0.25
  double frac_idf1_within_3points = 0.0;   // delta_idf1 <= 3 IDF1 points
  double mean_spearman_rho = 0.0;
};

/// Writes a CSV row per sweep plus a key-value summary with the aggregate
/// fractions. Every sweep must carry supervised columns.
CorrelationSummary correlation_report(
    const std::vector<std::pair<std::string, SweepResult>>& sweeps,
    const std::filesystem::path& csv_path, const std::filesystem::path& summary_path);

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);
void write_tune_text(const TuneOutcome& outcome, const std::filesystem::path& path);

}  // namespace sqe::harness
