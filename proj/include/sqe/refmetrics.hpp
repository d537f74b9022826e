// Supervised reference metrics: CLEAR MOT (MOTA / MOTP) with per-frame
// matching and carry-over, and identity metrics (IDF1 / IDP / IDR) from a
// single global truth-to-result trajectory matching.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "sqe/assignment.hpp"
#include "sqe/types.hpp"

namespace sqe {

double box_iou(const Box& a, const Box& b);

struct ClearCounts {
  std::int64_t fn_total = 0;
  std::int64_t fp_total = 0;
  std::int64_t ids_total = 0;
  std::int64_t gt_total = 0;
  double matched_distance_sum = 0.0;  // distance d = 1 - IOU
  std::int64_t matched_count = 0;
};

struct ClearResult {
  ClearCounts counts;
  double mota = 0.0;
  double motp = 0.0;
};

/// Per-frame CLEAR matching: previous-frame matches still above the IOU
/// threshold carry over, remaining boxes are matched by minimum total
/// 1 - IOU cost with sub-threshold pairs forbidden. An identity switch is
/// counted when a ground-truth target's matched hypothesis id differs from
/// its last known one. Throws when the ground truth is empty but the
/// hypothesis is not; both empty yields MOTA = 1, MOTP = 0.
ClearResult clear_mot(const GroundTruth& gt, const TrackSet& hyp,
                      double iou_threshold = 0.5);

struct IdCounts {
  std::int64_t idtp = 0;
  std::int64_t idfp = 0;
  std::int64_t idfn = 0;
};

struct IdResult {
  IdCounts counts;
  double idf1 = 0.0;
  double idp = 0.0;
  double idr = 0.0;
};

/// Truth-to-result matching: trajectory-level bipartite assignment whose
/// pair cost is the number of frames the gt/hyp pair does NOT match at the
/// IOU threshold, with dummy padding at full trajectory length for
/// unmatched trajectories; solved once globally.
IdResult id_metrics(const GroundTruth& gt, const TrackSet& hyp,
                    double iou_threshold = 0.5);

/// CSV row per sequence: sequence,IDF1,IDP,IDR,MOTA,MOTP,FN,FP,IDS.
void write_metrics_csv(const std::string& sequence, const IdResult& id,
                       const ClearResult& clear, const std::filesystem::path& path);

}  // namespace sqe
