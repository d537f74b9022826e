// sqemot: tracking, self quality evaluation and parameter tuning CLI.
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sqe/config.hpp"
#include "sqe/harness.hpp"
#include "sqe/io.hpp"
#include "sqe/metric.hpp"
#include "sqe/numfmt.hpp"
#include "sqe/refmetrics.hpp"
#include "sqe/synth.hpp"
#include "sqe/tracker.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalArgs {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string config_path;

  sqe::RunConfig config() const {
    return config_path.empty() ? sqe::RunConfig{} : sqe::load_config(config_path);
  }
};

std::optional<fs::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

int cmd_track(const GlobalArgs& g, const std::string& detections,
              const std::string& features, double reid, double merge,
              const std::string& out, const std::string& out_features) {
  auto cfg = g.config();
  sqe::LoadOptions load_opts{cfg.normalize};
  auto stream = sqe::load_detections(detections, opt_path(features), load_opts);
  sqe::TrackerConfig tracker_cfg{reid, merge, cfg.max_gap};
  auto ts = sqe::track(stream, tracker_cfg);
  sqe::save_trackset(ts, out);
  if (!out_features.empty()) sqe::save_features(ts, out_features);
  std::cout << "trajectories = " << ts.size() << "\n";
  return 0;
}

int cmd_sqe(const GlobalArgs& g, const std::string& tracks, const std::string& features,
            const std::string& report_path, const std::string& verdicts_path,
            double k2_override) {
  auto cfg = g.config();
  sqe::LoadOptions load_opts{cfg.normalize};
  auto ts = sqe::load_trackset(tracks, opt_path(features), load_opts);
  double k2 = k2_override > 0.0 ? k2_override : cfg.k2_reid;
  sqe::EvalOptions opts;
  opts.seed = g.seed;
  opts.max_pairs = cfg.max_pairs;
  auto report = sqe::evaluate(ts, cfg.sqe_params(k2), opts);
  sqe::write_report_text(report, report_path);
  if (!verdicts_path.empty()) sqe::write_verdicts_csv(report, verdicts_path);
  std::cout << "sqe = " << sqe::format_double(report.sqe) << "\n";
  return 0;
}

int cmd_eval(const GlobalArgs&, const std::string& tracks, const std::string& gt_path,
             double iou, const std::string& report_path, std::string name) {
  auto hyp = sqe::load_trackset(tracks);
  auto gt = sqe::load_trackset(gt_path);
  if (name.empty()) name = fs::path(tracks).stem().string();
  auto id_res = sqe::id_metrics(gt, hyp, iou);
  auto clear_res = sqe::clear_mot(gt, hyp, iou);
  sqe::write_metrics_csv(name, id_res, clear_res, report_path);
  std::cout << "idf1 = " << sqe::format_double(id_res.idf1)
            << " mota = " << sqe::format_double(clear_res.mota) << "\n";
  return 0;
}

int cmd_sweep(const GlobalArgs& g, const std::string& detections,
              const std::string& features, const std::string& param, double start,
              double stop, double step, const std::string& gt_path,
              const std::string& out, double reid, double merge) {
  auto cfg = g.config();
  sqe::LoadOptions load_opts{cfg.normalize};
  auto stream = sqe::load_detections(detections, opt_path(features), load_opts);

  sqe::harness::GridSpec grid;
  grid.parameter = param == "merge" ? sqe::harness::SweptParam::merge
                                    : sqe::harness::SweptParam::reid;
  grid.start = start;
  grid.stop = stop;
  grid.step = step;

  sqe::TrackerConfig fixed{reid, merge, cfg.max_gap};
  double k2 = grid.parameter == sqe::harness::SweptParam::reid ? cfg.k2_reid : cfg.k2_merge;

  std::optional<sqe::GroundTruth> gt;
  if (!gt_path.empty()) gt = sqe::load_trackset(gt_path);

  sqe::harness::SweepOptions opts;
  opts.seed = g.seed;
  opts.threads = g.threads;
  opts.max_pairs = cfg.max_pairs;
  auto result = sqe::harness::sweep(stream, grid, fixed, cfg.sqe_params(k2),
                                    gt ? &*gt : nullptr, opts);
  sqe::harness::write_sweep_csv(result, out);
  std::cout << "argmax_sqe = " << sqe::format_double(result.argmax_sqe) << "\n";
  if (result.argmax_idf1) {
    std::cout << "argmax_idf1 = " << sqe::format_double(*result.argmax_idf1) << "\n";
  }
  return 0;
}

int cmd_tune(const GlobalArgs& g, const std::string& detections,
             const std::string& features, double baseline_reid, double baseline_merge,
             int rounds, const std::string& out, const sqe::harness::TuneGrids& grids) {
  auto cfg = g.config();
  sqe::LoadOptions load_opts{cfg.normalize};
  auto stream = sqe::load_detections(detections, opt_path(features), load_opts);

  sqe::TrackerConfig baseline{baseline_reid, baseline_merge, cfg.max_gap};
  sqe::harness::TuneParams params;
  params.base = cfg.sqe_params(cfg.k2_reid);
  params.k2_reid = cfg.k2_reid;
  params.k2_merge = cfg.k2_merge;

  sqe::harness::SweepOptions opts;
  opts.seed = g.seed;
  opts.threads = g.threads;
  opts.max_pairs = cfg.max_pairs;
  auto outcome = sqe::harness::tune_alternating(stream, baseline, grids, params, rounds, opts);
  sqe::harness::write_tune_text(outcome, out);
  std::cout << "customized_reid = " << sqe::format_double(outcome.customized.reid_threshold)
            << "\ncustomized_merge = "
            << sqe::format_double(outcome.customized.merge_threshold) << "\n";
  return 0;
}

int cmd_synth(const GlobalArgs&, const std::string& scenario_path,
              const std::string& out_dir) {
  auto scenario = sqe::synth::load_scenario(scenario_path);
  auto scene = sqe::synth::generate(scenario);
  fs::path dir(out_dir);
  fs::create_directories(dir);
  sqe::save_trackset(scene.truth, dir / "gt.csv");
  sqe::save_detections(scene.stream, dir / "det.csv", dir / "det_features.csv");
  sqe::save_trackset(scene.hypothesis, dir / "hyp.csv");
  sqe::save_features(scene.hypothesis, dir / "hyp_features.csv");
  std::cout << "targets = " << scene.truth.size()
            << " hypothesis_trajectories = " << scene.hypothesis.size() << "\n";
  return 0;
}

int cmd_chicheck(const GlobalArgs&, const std::string& scenario_path,
                 std::int64_t samples, const std::string& report_path,
                 const std::string& mode, double sigma_mult, bool drop_mean_shift) {
  auto scenario = sqe::synth::load_scenario(scenario_path);
  sqe::synth::StandardizeOverride override_;
  override_.sigma_multiplier = sigma_mult;
  override_.drop_mean_shift = drop_mean_shift;

  std::string effective_mode = mode;
  if (effective_mode.empty()) {
    effective_mode = scenario.targets.size() == 1 ? "intra" : "inter";
  }
  sqe::synth::ChiCheckResult result;
  if (effective_mode == "intra") {
    result = sqe::synth::chi_check_intra(scenario, static_cast<std::size_t>(samples),
                                         override_);
  } else {
    if (scenario.targets.size() < 2) {
      throw sqe::ValidationError("inter chi check needs two targets in the scenario");
    }
    result = sqe::synth::chi_check_inter(scenario.targets[0], scenario.targets[1],
                                         static_cast<std::size_t>(samples),
                                         scenario.seed, override_);
  }

  std::string out;
  out += "mode = " + effective_mode + "\n";
  out += "ks_statistic = " + sqe::format_double(result.ks_statistic) + "\n";
  out += "p_value = " + sqe::format_double(result.p_value) + "\n";
  out += "sample_count = " + std::to_string(result.sample_count) + "\n";
  out += "dof = " + std::to_string(result.dof) + "\n";
  std::ofstream f(report_path, std::ios::binary);
  if (!f) throw sqe::IoError("cannot open report file: " + report_path);
  f << out;
  std::cout << "p_value = " << sqe::format_double(result.p_value) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-object tracking with ground-truth-free self evaluation"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--seed", g.seed, "Global seed for all randomized steps");
  app.add_option("--threads", g.threads, "Worker threads for grid sweeps")
      ->check(CLI::PositiveNumber);

  // track
  auto* track_cmd = app.add_subcommand("track", "Run the tracker on a detection stream");
  std::string t_det, t_feat, t_out, t_out_feat;
  double t_reid = 0.8, t_merge = 1.0;
  track_cmd->add_option("--detections", t_det, "Detections file (id column -1)")->required();
  track_cmd->add_option("--features", t_feat, "Features file for the detections")->required();
  track_cmd->add_option("--reid", t_reid, "REID association threshold")->required();
  track_cmd->add_option("--merge", t_merge, "Tracklet merging threshold")->required();
  track_cmd->add_option("--out", t_out, "Output tracks file")->required();
  track_cmd->add_option("--out-features", t_out_feat, "Output features file");
  track_cmd->add_option("--config", g.config_path, "Run configuration file");

  // sqe
  auto* sqe_cmd = app.add_subcommand("sqe", "Self quality evaluation of a track set");
  std::string q_tracks, q_feat, q_report, q_verdicts;
  double q_k2 = 0.0;
  sqe_cmd->add_option("--tracks", q_tracks, "Tracks file")->required();
  sqe_cmd->add_option("--features", q_feat, "Features file")->required();
  sqe_cmd->add_option("--report", q_report, "Output report (key-value text)")->required();
  sqe_cmd->add_option("--verdicts", q_verdicts, "Optional per-trajectory verdict CSV");
  sqe_cmd->add_option("--k2", q_k2, "Override the k2 weight (default from config)");
  sqe_cmd->add_option("--config", g.config_path, "Run configuration file");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Supervised metrics against ground truth");
  std::string e_tracks, e_gt, e_report, e_name;
  double e_iou = 0.5;
  eval_cmd->add_option("--tracks", e_tracks, "Tracks file")->required();
  eval_cmd->add_option("--gt", e_gt, "Ground-truth tracks file")->required();
  eval_cmd->add_option("--iou", e_iou, "IOU match threshold");
  eval_cmd->add_option("--report", e_report, "Output metrics CSV")->required();
  eval_cmd->add_option("--name", e_name, "Sequence name for the CSV row");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid sweep of one tracker parameter");
  std::string s_det, s_feat, s_param, s_gt, s_out;
  double s_start = 0.0, s_stop = 0.0, s_step = 0.0, s_reid = 0.8, s_merge = 1.0;
  sweep_cmd->add_option("--detections", s_det)->required();
  sweep_cmd->add_option("--features", s_feat)->required();
  sweep_cmd->add_option("--param", s_param, "Swept parameter: reid or merge")
      ->required()
      ->check(CLI::IsMember({"reid", "merge"}));
  sweep_cmd->add_option("--start", s_start)->required();
  sweep_cmd->add_option("--stop", s_stop)->required();
  sweep_cmd->add_option("--step", s_step)->required();
  sweep_cmd->add_option("--gt", s_gt, "Optional ground truth for supervised columns");
  sweep_cmd->add_option("--out", s_out, "Output sweep CSV")->required();
  sweep_cmd->add_option("--reid", s_reid, "Fixed REID threshold when sweeping merge");
  sweep_cmd->add_option("--merge", s_merge, "Fixed merge threshold when sweeping reid");
  sweep_cmd->add_option("--config", g.config_path, "Run configuration file");

  // tune
  auto* tune_cmd = app.add_subcommand("tune", "Alternating two-parameter self-optimization");
  std::string u_det, u_feat, u_out;
  double u_reid = 0.0, u_merge = 0.0;
  int u_rounds = 1;
  sqe::harness::TuneGrids u_grids;
  tune_cmd->add_option("--detections", u_det)->required();
  tune_cmd->add_option("--features", u_feat)->required();
  tune_cmd->add_option("--baseline-reid", u_reid)->required();
  tune_cmd->add_option("--baseline-merge", u_merge)->required();
  tune_cmd->add_option("--rounds", u_rounds)->check(CLI::PositiveNumber);
  tune_cmd->add_option("--out", u_out, "Output tune report")->required();
  tune_cmd->add_option("--reid-start", u_grids.reid.start);
  tune_cmd->add_option("--reid-stop", u_grids.reid.stop);
  tune_cmd->add_option("--reid-step", u_grids.reid.step);
  tune_cmd->add_option("--merge-start", u_grids.merge.start);
  tune_cmd->add_option("--merge-stop", u_grids.merge.stop);
  tune_cmd->add_option("--merge-step", u_grids.merge.step);
  tune_cmd->add_option("--config", g.config_path, "Run configuration file");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene");
  std::string y_scenario, y_out_dir;
  synth_cmd->add_option("--scenario", y_scenario, "Scenario file")->required();
  synth_cmd->add_option("--out-dir", y_out_dir, "Output directory")->required();

  // chicheck
  auto* chi_cmd = app.add_subcommand("chicheck", "KS test of standardized distances");
  std::string c_scenario, c_report, c_mode;
  std::int64_t c_samples = 10000;
  double c_sigma_mult = 1.0;
  bool c_drop_shift = false;
  chi_cmd->add_option("--scenario", c_scenario, "Scenario file")->required();
  chi_cmd->add_option("--samples", c_samples, "Number of feature pairs")->required();
  chi_cmd->add_option("--report", c_report, "Output report")->required();
  chi_cmd->add_option("--mode", c_mode, "intra or inter (default by target count)")
      ->check(CLI::IsMember({"intra", "inter"}));
  chi_cmd->add_option("--sigma-mult", c_sigma_mult,
                      "Standardize with a scaled sigma (negative control)");
  chi_cmd->add_flag("--drop-mean-shift", c_drop_shift,
                    "Omit the cross-target mean shift (negative control)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*track_cmd) return cmd_track(g, t_det, t_feat, t_reid, t_merge, t_out, t_out_feat);
    if (*sqe_cmd) return cmd_sqe(g, q_tracks, q_feat, q_report, q_verdicts, q_k2);
    if (*eval_cmd) return cmd_eval(g, e_tracks, e_gt, e_iou, e_report, e_name);
    if (*sweep_cmd) {
      return cmd_sweep(g, s_det, s_feat, s_param, s_start, s_stop, s_step, s_gt, s_out,
                       s_reid, s_merge);
    }
    if (*tune_cmd) {
      return cmd_tune(g, u_det, u_feat, u_reid, u_merge, u_rounds, u_out, u_grids);
    }
    if (*synth_cmd) return cmd_synth(g, y_scenario, y_out_dir);
    if (*chi_cmd) {
      return cmd_chicheck(g, c_scenario, c_samples, c_report, c_mode, c_sigma_mult,
                          c_drop_shift);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
