// Minimal tracking-by-detection: per-frame association of detections to
// tracklets by REID feature distance (Hungarian, pairs above the threshold
// forbidden), greedy merging of temporally disjoint tracklets, and linear
// gap interpolation. Deliberately simple; the association and merging
// thresholds are the knobs the tuning harness turns.
#pragma once

#include <cstdint>

#include "sqe/types.hpp"

namespace sqe {

struct TrackerConfig {
  double reid_threshold = 0.8;   // max feature distance for association
  double merge_threshold = 1.0;  // max representative distance for merging
  std::int64_t max_gap = 30;     // frames a tracklet survives unmatched

  void validate() const;
};

/// Runs the full pass: association, merging, then interpolation.
/// Output ids are dense integers in creation order.
TrackSet track(const DetectionStream& stream, const TrackerConfig& cfg);

/// Repeatedly merges the temporally disjoint pair (no shared detection
/// frames) with the smallest representative-feature (mean) distance below
/// the threshold; the earlier tracklet absorbs the later one. Ids are
/// re-densified afterwards.
TrackSet merge_tracklets(const TrackSet& ts, double merge_threshold);

/// Fills frame gaps inside each trajectory with linearly interpolated
/// boxes. Interpolated detections carry no feature and are marked
/// synthetic, so they never enter distance computations.
TrackSet interpolate(const TrackSet& ts);

}  // namespace sqe
