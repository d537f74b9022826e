#include "sqe/harness.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <future>

#include "sqe/numfmt.hpp"
#include "sqe/rng.hpp"
#include "sqe/stats.hpp"

namespace sqe::harness {

std::string to_string(SweptParam p) { return p == SweptParam::reid ? "reid" : "merge"; }

std::vector<double> GridSpec::values() const {
  if (!(step > 0.0)) throw ValidationError("grid step must be positive");
  if (!(start < stop)) throw ValidationError("grid start must be below stop");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    double v = start + static_cast<double>(i) * step;
    if (v > stop + step * 1e-9) break;
    out.push_back(v);
  }
  return out;
}

namespace {

SweepRow evaluate_point(const DetectionStream& stream, SweptParam param, double value,
                        TrackerConfig cfg, const SqeParams& params,
                        const GroundTruth* gt, const SweepOptions& opts) {
  if (param == SweptParam::reid) {
    cfg.reid_threshold = value;
  } else {
    cfg.merge_threshold = value;
  }
  TrackSet ts = track(stream, cfg);

  EvalOptions eval_opts;
  eval_opts.seed = mix_seed(opts.seed, std::bit_cast<std::uint64_t>(value));
  eval_opts.max_pairs = opts.max_pairs;
  SqeReport report = evaluate(ts, params, eval_opts);

  SweepRow row;
  row.value = value;
  row.sqe = report.sqe;
  row.n = report.n;
  row.mean_len = report.mean_len;
  row.fp = report.fp;
  row.dif = report.dif;
  row.sim = report.sim;
  if (gt) {
    auto id_res = id_metrics(*gt, ts, opts.iou_threshold);
    auto clear_res = clear_mot(*gt, ts, opts.iou_threshold);
    row.idf1 = id_res.idf1;
    row.idp = id_res.idp;
    row.idr = id_res.idr;
    row.mota = clear_res.mota;
    row.motp = clear_res.motp;
    row.fn_boxes = clear_res.counts.fn_total;
    row.fp_boxes = clear_res.counts.fp_total;
    row.ids = clear_res.counts.ids_total;
  }
  return row;
}

}  // namespace

SweepResult sweep(const DetectionStream& stream, const GridSpec& grid,
                  const TrackerConfig& fixed, const SqeParams& params,
                  const GroundTruth* gt, const SweepOptions& opts) {
  params.validate();
  auto values = grid.values();
  SweepResult result;
  result.parameter = grid.parameter;
  result.rows.resize(values.size());

  auto run_point = [&](std::size_t i) {
    try {
      result.rows[i] = evaluate_point(stream, grid.parameter, values[i], fixed,
                                      params, gt, opts);
    } catch (const Error& e) {
      throw Error("grid point " + to_string(grid.parameter) + " = " +
                  format_double(values[i]) + ": " + e.what());
    }
  };

  int threads = std::max(1, opts.threads);
  if (threads == 1 || values.size() <= 1) {
    for (std::size_t i = 0; i < values.size(); ++i) run_point(i);
  } else {
    std::vector<std::future<void>> futures;
    for (int w = 0; w < threads; ++w) {
      futures.push_back(std::async(std::launch::async, [&, w]() {
        for (std::size_t i = static_cast<std::size_t>(w); i < values.size();
             i += static_cast<std::size_t>(threads)) {
          run_point(i);
        }
      }));
    }
    for (auto& f : futures) f.get();
  }

  // Ties resolve to the smaller parameter value.
  std::size_t best_sqe = 0;
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    if (result.rows[i].sqe > result.rows[best_sqe].sqe) best_sqe = i;
  }
  result.argmax_sqe = result.rows[best_sqe].value;
  if (gt) {
    std::size_t best_idf1 = 0;
    for (std::size_t i = 1; i < result.rows.size(); ++i) {
      if (*result.rows[i].idf1 > *result.rows[best_idf1].idf1) best_idf1 = i;
    }
    result.argmax_idf1 = result.rows[best_idf1].value;
  }
  return result;
}

TuneOutcome tune_alternating(const DetectionStream& stream, const TrackerConfig& baseline,
                             const TuneGrids& grids, const TuneParams& params,
                             int rounds, const SweepOptions& opts) {
  if (rounds < 1) throw ValidationError("tune_alternating needs rounds >= 1");
  baseline.validate();
  TuneOutcome outcome;
  outcome.baseline = baseline;
  TrackerConfig cfg = baseline;
  for (int r = 0; r < rounds; ++r) {
    SqeParams reid_params = params.base;
    reid_params.k2 = params.k2_reid;
    auto reid_sweep = sweep(stream, grids.reid, cfg, reid_params, nullptr, opts);
    cfg.reid_threshold = reid_sweep.argmax_sqe;

    SqeParams merge_params = params.base;
    merge_params.k2 = params.k2_merge;
    auto merge_sweep = sweep(stream, grids.merge, cfg, merge_params, nullptr, opts);
    cfg.merge_threshold = merge_sweep.argmax_sqe;

    outcome.rounds.push_back({reid_sweep.argmax_sqe, merge_sweep.argmax_sqe});
  }
  outcome.customized = cfg;
  return outcome;
}

CorrelationSummary correlation_report(
    const std::vector<std::pair<std::string, SweepResult>>& sweeps,
    const std::filesystem::path& csv_path, const std::filesystem::path& summary_path) {
  if (sweeps.empty()) throw ValidationError("correlation_report needs at least one sweep");

  CorrelationSummary summary;
  for (const auto& [name, res] : sweeps) {
    if (!res.has_supervised()) {
      throw ValidationError("sweep '" + name + "' has no supervised columns");
    }
    CorrelationRow row;
    row.name = name;
    row.argmax_sqe = res.argmax_sqe;
    row.argmax_idf1 = *res.argmax_idf1;
    row.delta_param = std::abs(row.argmax_sqe - row.argmax_idf1);
    std::vector<double> sqe_col, idf1_col;
    for (const auto& r : res.rows) {
      sqe_col.push_back(r.sqe);
      idf1_col.push_back(*r.idf1);
      if (r.value == res.argmax_sqe) row.idf1_at_sqe = *r.idf1;
      if (*r.idf1 > row.idf1_best) row.idf1_best = *r.idf1;
    }
    row.delta_idf1_points = (row.idf1_best - row.idf1_at_sqe) * 100.0;
    if (row.delta_idf1_points < 0.0) {
      throw Error("internal: argmax_idf1 is not optimal in sweep '" + name + "'");
    }
    row.spearman_rho = spearman_rho(sqe_col, idf1_col);
    summary.rows.push_back(std::move(row));
  }

  double n = static_cast<double>(summary.rows.size());
  for (const auto& row : summary.rows) {
    if (row.delta_param <= 0.25 + 1e-9) summary.frac_param_within_quarter += 1.0;
    if (row.delta_idf1_points <= 3.0 + 1e-9) summary.frac_idf1_within_3points += 1.0;
    summary.mean_spearman_rho += row.spearman_rho;
  }
  summary.frac_param_within_quarter /= n;
  summary.frac_idf1_within_3points /= n;
  summary.mean_spearman_rho /= n;

  std::string csv =
      "sweep,argmax_sqe,argmax_idf1,delta_param,idf1_at_sqe_argmax,idf1_best,"
      "delta_idf1_points,spearman_rho\n";
  for (const auto& row : summary.rows) {
    csv += row.name;
    for (double v : {row.argmax_sqe, row.argmax_idf1, row.delta_param, row.idf1_at_sqe,
                     row.idf1_best, row.delta_idf1_points, row.spearman_rho}) {
      csv += ',';
      append_double(csv, v);
    }
    csv += '\n';
  }
  std::ofstream cf(csv_path, std::ios::binary);
  if (!cf) throw IoError("cannot open correlation csv: " + csv_path.string());
  cf << csv;

  std::string text;
  text += "sweeps = " + std::to_string(summary.rows.size()) + "\n";
  text += "frac_delta_param_le_0.25 = " + format_double(summary.frac_param_within_quarter) + "\n";
  text += "frac_delta_idf1_le_3points = " + format_double(summary.frac_idf1_within_3points) + "\n";
  text += "mean_spearman_rho = " + format_double(summary.mean_spearman_rho) + "\n";
  std::ofstream sf(summary_path, std::ios::binary);
  if (!sf) throw IoError("cannot open correlation summary: " + summary_path.string());
  sf << text;

  return summary;
}

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::string out =
      "parameter,value,sqe,n,L,fp,dif,sim,idf1,idp,idr,mota,motp,fn,fp_boxes,ids\n";
  for (const auto& r : result.rows) {
    out += to_string(result.parameter);
    out += ',';
    append_double(out, r.value);
    out += ',';
    append_double(out, r.sqe);
    out += ',' + std::to_string(r.n) + ',';
    append_double(out, r.mean_len);
    out += ',' + std::to_string(r.fp) + ',' + std::to_string(r.dif) + ',' +
           std::to_string(r.sim);
    for (const auto& v : {r.idf1, r.idp, r.idr, r.mota, r.motp}) {
      out += ',';
      if (v) append_double(out, *v);
    }
    for (const auto& v : {r.fn_boxes, r.fp_boxes, r.ids}) {
      out += ',';
      if (v) out += std::to_string(*v);
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open sweep csv: " + path.string());
  f << out;
}

void write_tune_text(const TuneOutcome& outcome, const std::filesystem::path& path) {
  std::string out;
  out += "baseline_reid = " + format_double(outcome.baseline.reid_threshold) + "\n";
  out += "baseline_merge = " + format_double(outcome.baseline.merge_threshold) + "\n";
  out += "customized_reid = " + format_double(outcome.customized.reid_threshold) + "\n";
  out += "customized_merge = " + format_double(outcome.customized.merge_threshold) + "\n";
  out += "rounds = " + std::to_string(outcome.rounds.size()) + "\n";
  for (std::size_t i = 0; i < outcome.rounds.size(); ++i) {
    out += "round" + std::to_string(i + 1) + "_reid = " +
           format_double(outcome.rounds[i].reid_argmax) + "\n";
    out += "round" + std::to_string(i + 1) + "_merge = " +
           format_double(outcome.rounds[i].merge_argmax) + "\n";
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open tune file: " + path.string());
  f << out;
}

}  // namespace sqe::harness
