// Core domain types for trajectories, track sets and detection streams.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqe {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Input violates a structural invariant (bad box, duplicate frame, ...).
struct ValidationError : Error {
  using Error::Error;
};
// A file row could not be parsed; message carries the line number.
struct ParseError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
// Eq-solving for the erroneous-frame estimate has no real solution.
struct InfeasibleEstimateError : Error {
  using Error::Error;
};

using FeatureVec = std::vector<double>;

struct Box {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;
};

struct Detection {
  std::int64_t frame = 0;
  Box box{};
  double confidence = 1.0;
  std::optional<FeatureVec> feature;
  // Synthetic detections (gap interpolation) carry no feature and are
  // skipped by all distance computations.
  bool interpolated = false;

  bool has_feature() const { return feature.has_value(); }
};

/// One trajectory hypothesis: detections strictly ordered by frame,
/// at most one detection per frame.
struct Trajectory {
  std::int64_t id = 0;
  std::vector<Detection> detections;

  std::size_t length() const { return detections.size(); }
  std::int64_t first_frame() const { return detections.front().frame; }
  std::int64_t last_frame() const { return detections.back().frame; }
  bool overlaps_in_time(const Trajectory& other) const {
    return first_frame() <= other.last_frame() &&
           other.first_frame() <= last_frame();
  }
};

/// A set of trajectory hypotheses with distinct ids. feature_dim is set
/// when any detection carries a feature; all features share a dimension.
struct TrackSet {
  std::vector<Trajectory> trajectories;
  std::optional<std::size_t> feature_dim;

  std::size_t size() const { return trajectories.size(); }
  bool empty() const { return trajectories.empty(); }

  // Throws ValidationError on any invariant violation.
  void validate() const;
};

// Ground truth has the same shape as a TrackSet, normally without features.
using GroundTruth = TrackSet;

/// Per-frame detections, frames ascending; the tracker input.
struct DetectionStream {
  struct FrameBlock {
    std::int64_t frame = 0;
    std::vector<Detection> detections;
  };
  std::vector<FrameBlock> frames;
  std::optional<std::size_t> feature_dim;

  std::size_t detection_count() const {
    std::size_t n = 0;
    for (const auto& f : frames) n += f.detections.size();
    return n;
  }
  void validate() const;
};

void validate_detection(const Detection& d);
void validate_trajectory(const Trajectory& t);

/// Arithmetic mean of trajectory lengths (detection counts).
/// Throws ValidationError on an empty set.
double mean_length(const TrackSet& ts);

}  // namespace sqe
