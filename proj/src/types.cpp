#include "sqe/types.hpp"

#include <cmath>
#include <unordered_set>

namespace sqe {

namespace {

bool all_finite(const FeatureVec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

void validate_detection(const Detection& d) {
  if (d.frame < 0) {
    throw ValidationError("detection frame must be non-negative, got " +
                          std::to_string(d.frame));
  }
  if (!(d.box.width > 0.0) || !(d.box.height > 0.0)) {
    throw ValidationError("detection box must have positive width and height");
  }
  if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
    throw ValidationError("detection confidence must lie in [0, 1]");
  }
  if (d.feature && !all_finite(*d.feature)) {
    throw ValidationError("feature vector contains a non-finite entry");
  }
  if (d.feature && d.feature->empty()) {
    throw ValidationError("feature vector must have dimension >= 1");
  }
}

void validate_trajectory(const Trajectory& t) {
  if (t.id < 0) {
    throw ValidationError("trajectory id must be non-negative, got " +
                          std::to_string(t.id));
  }
  if (t.detections.empty()) {
    throw ValidationError("trajectory " + std::to_string(t.id) +
                          " has no detections");
  }
  std::int64_t prev_frame = -1;
  for (const auto& d : t.detections) {
    validate_detection(d);
    if (d.frame <= prev_frame) {
      throw ValidationError("trajectory " + std::to_string(t.id) +
                            ": frames must be strictly increasing at frame " +
                            std::to_string(d.frame));
    }
    prev_frame = d.frame;
  }
}

void TrackSet::validate() const {
  std::unordered_set<std::int64_t> ids;
  std::optional<std::size_t> dim = feature_dim;
  for (const auto& t : trajectories) {
    validate_trajectory(t);
    if (!ids.insert(t.id).second) {
      throw ValidationError("duplicate trajectory id " + std::to_string(t.id));
    }
    for (const auto& d : t.detections) {
      if (!d.feature) continue;
      if (!dim) dim = d.feature->size();
      if (d.feature->size() != *dim) {
        throw ValidationError("feature dimension mismatch: expected " +
                              std::to_string(*dim) + ", got " +
                              std::to_string(d.feature->size()));
      }
    }
  }
  if (feature_dim && dim != feature_dim) {
    throw ValidationError("declared feature_dim does not match data");
  }
}

void DetectionStream::validate() const {
  std::int64_t prev_frame = -1;
  std::optional<std::size_t> dim = feature_dim;
  for (const auto& fb : frames) {
    if (fb.frame <= prev_frame) {
      throw ValidationError("detection stream frames must be ascending");
    }
    prev_frame = fb.frame;
    for (const auto& d : fb.detections) {
      validate_detection(d);
      if (d.frame != fb.frame) {
        throw ValidationError("detection frame does not match its block");
      }
      if (d.feature) {
        if (!dim) dim = d.feature->size();
        if (d.feature->size() != *dim) {
          throw ValidationError("feature dimension mismatch in stream");
        }
      }
    }
  }
}

double mean_length(const TrackSet& ts) {
  if (ts.empty()) {
    throw ValidationError("mean_length is undefined for an empty track set");
  }
  std::size_t total = 0;
  for (const auto& t : ts.trajectories) total += t.length();
  return static_cast<double>(total) / static_cast<double>(ts.size());
}

}  // namespace sqe
