#include "sqe/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "sqe/assignment.hpp"
#include "sqe/distance.hpp"

namespace sqe {

void TrackerConfig::validate() const {
  if (!(reid_threshold > 0.0) || !(merge_threshold > 0.0)) {
    throw ValidationError("tracker thresholds must be strictly positive");
  }
  if (max_gap < 0) throw ValidationError("max_gap must be non-negative");
}

namespace {

struct Tracklet {
  Trajectory traj;
  FeatureVec mean_feature;
  std::int64_t last_frame = 0;
  bool open = true;

  void add(const Detection& d) {
    const FeatureVec& f = *d.feature;
    if (mean_feature.empty()) {
      mean_feature = f;
    } else {
      double n = static_cast<double>(traj.detections.size());
      for (std::size_t k = 0; k < f.size(); ++k) {
        mean_feature[k] += (f[k] - mean_feature[k]) / (n + 1.0);
      }
    }
    traj.detections.push_back(d);
    last_frame = d.frame;
  }
};

FeatureVec mean_of(const Trajectory& t) {
  FeatureVec mean;
  double n = 0.0;
  for (const auto& d : t.detections) {
    if (!d.has_feature()) continue;
    if (mean.empty()) mean.assign(d.feature->size(), 0.0);
    n += 1.0;
    for (std::size_t k = 0; k < mean.size(); ++k) {
      mean[k] += ((*d.feature)[k] - mean[k]) / n;
    }
  }
  return mean;
}

}  // namespace

TrackSet track(const DetectionStream& stream, const TrackerConfig& cfg) {
  cfg.validate();
  stream.validate();
  for (const auto& fb : stream.frames) {
    for (const auto& d : fb.detections) {
      if (!d.has_feature()) {
        throw ValidationError("tracker input requires a feature on every detection");
      }
    }
  }

  std::vector<Tracklet> tracklets;  // creation order
  std::vector<std::size_t> open;    // indices into tracklets

  for (const auto& fb : stream.frames) {
    // Close tracklets that outran the association memory.
    std::erase_if(open, [&](std::size_t idx) {
      if (fb.frame - tracklets[idx].last_frame > cfg.max_gap) {
        tracklets[idx].open = false;
        return true;
      }
      return false;
    });

    const auto& dets = fb.detections;
    std::vector<int> det_to_tracklet(dets.size(), -1);
    if (!open.empty() && !dets.empty()) {
      AssignmentProblem prob;
      prob.rows = dets.size();
      prob.cols = open.size();
      prob.cost.resize(prob.rows * prob.cols);
      prob.allowed.assign(prob.rows * prob.cols, 0);
      for (std::size_t r = 0; r < prob.rows; ++r) {
        for (std::size_t c = 0; c < prob.cols; ++c) {
          double d = feature_distance(*dets[r].feature,
                                      tracklets[open[c]].mean_feature);
          prob.cost[r * prob.cols + c] = d;
          prob.allowed[r * prob.cols + c] = d <= cfg.reid_threshold ? 1 : 0;
        }
      }
      for (const auto& [r, c] : solve_assignment(prob)) {
        det_to_tracklet[r] = static_cast<int>(open[c]);
      }
    }
    for (std::size_t r = 0; r < dets.size(); ++r) {
      if (det_to_tracklet[r] >= 0) {
        tracklets[static_cast<std::size_t>(det_to_tracklet[r])].add(dets[r]);
      } else {
        Tracklet t;
        t.traj.id = static_cast<std::int64_t>(tracklets.size());
        t.add(dets[r]);
        tracklets.push_back(std::move(t));
        open.push_back(tracklets.size() - 1);
      }
    }
  }

  TrackSet ts;
  ts.feature_dim = stream.feature_dim;
  if (!ts.feature_dim && !tracklets.empty()) {
    ts.feature_dim = tracklets.front().mean_feature.size();
  }
  for (auto& t : tracklets) ts.trajectories.push_back(std::move(t.traj));
  if (ts.trajectories.empty()) ts.feature_dim.reset();

  ts = merge_tracklets(ts, cfg.merge_threshold);
  return interpolate(ts);
}

TrackSet merge_tracklets(const TrackSet& ts, double merge_threshold) {
  if (!(merge_threshold > 0.0)) {
    throw ValidationError("merge_threshold must be strictly positive");
  }
  ts.validate();

  struct Node {
    Trajectory traj;
    FeatureVec mean;
    std::size_t feat_count = 0;
    bool alive = true;
    std::uint64_t version = 0;
  };
  std::vector<Node> nodes;
  for (const auto& t : ts.trajectories) {
    Node n;
    n.traj = t;
    n.mean = mean_of(t);
    for (const auto& d : t.detections) {
      if (d.has_feature()) ++n.feat_count;
    }
    nodes.push_back(std::move(n));
  }

  // Temporally disjoint = no shared detection frame. A merged track may
  // span another tracklet's gap; claiming the same frame twice is what the
  // guard forbids.
  auto disjoint = [&](const Node& a, const Node& b) {
    if (a.traj.last_frame() < b.traj.first_frame() ||
        b.traj.last_frame() < a.traj.first_frame()) {
      return true;
    }
    auto ia = a.traj.detections.begin();
    auto ib = b.traj.detections.begin();
    while (ia != a.traj.detections.end() && ib != b.traj.detections.end()) {
      if (ia->frame == ib->frame) return false;
      if (ia->frame < ib->frame) {
        ++ia;
      } else {
        ++ib;
      }
    }
    return true;
  };

  // Candidate heap keyed by (distance, i, j); entries are validated against
  // node versions on pop and recomputed lazily after merges.
  using Entry = std::tuple<double, std::size_t, std::size_t, std::uint64_t, std::uint64_t>;
  auto cmp = [](const Entry& a, const Entry& b) { return a > b; };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);

  auto push_pair = [&](std::size_t i, std::size_t j) {
    const Node& a = nodes[i];
    const Node& b = nodes[j];
    if (!a.alive || !b.alive || !disjoint(a, b)) return;
    if (a.mean.empty() || b.mean.empty() || a.mean.size() != b.mean.size()) return;
    double d = feature_distance(a.mean, b.mean);
    if (d <= merge_threshold) heap.emplace(d, i, j, a.version, b.version);
  };

  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) push_pair(i, j);
  }

  while (!heap.empty()) {
    auto [d, i, j, vi, vj] = heap.top();
    heap.pop();
    Node& a = nodes[i];
    Node& b = nodes[j];
    if (!a.alive || !b.alive || a.version != vi || b.version != vj) continue;
    if (!disjoint(a, b)) continue;

    // Earlier absorbs later.
    Node& earlier = a.traj.first_frame() <= b.traj.first_frame() ? a : b;
    Node& later = (&earlier == &a) ? b : a;
    earlier.traj.detections.insert(earlier.traj.detections.end(),
                                   later.traj.detections.begin(),
                                   later.traj.detections.end());
    std::sort(earlier.traj.detections.begin(), earlier.traj.detections.end(),
              [](const Detection& x, const Detection& y) { return x.frame < y.frame; });
    double na = static_cast<double>(earlier.feat_count);
    double nb = static_cast<double>(later.feat_count);
    if (nb > 0.0) {
      if (earlier.mean.empty()) {
        earlier.mean = later.mean;
      } else {
        for (std::size_t k = 0; k < earlier.mean.size(); ++k) {
          earlier.mean[k] = (earlier.mean[k] * na + later.mean[k] * nb) / (na + nb);
        }
      }
      earlier.feat_count += later.feat_count;
    }
    later.alive = false;
    ++earlier.version;
    std::size_t kept = (&earlier == &a) ? i : j;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (k == kept || !nodes[k].alive) continue;
      push_pair(std::min(k, kept), std::max(k, kept));
    }
  }

  TrackSet out;
  out.feature_dim = ts.feature_dim;
  for (auto& n : nodes) {
    if (!n.alive) continue;
    n.traj.id = static_cast<std::int64_t>(out.trajectories.size());
    out.trajectories.push_back(std::move(n.traj));
  }
  if (out.trajectories.empty()) out.feature_dim.reset();
  out.validate();
  return out;
}

TrackSet interpolate(const TrackSet& ts) {
  ts.validate();
  TrackSet out;
  out.feature_dim = ts.feature_dim;
  for (const auto& t : ts.trajectories) {
    Trajectory filled;
    filled.id = t.id;
    for (std::size_t i = 0; i < t.detections.size(); ++i) {
      const Detection& cur = t.detections[i];
      if (i > 0) {
        const Detection& prev = t.detections[i - 1];
        std::int64_t gap = cur.frame - prev.frame;
        for (std::int64_t step = 1; step < gap; ++step) {
          double w = static_cast<double>(step) / static_cast<double>(gap);
          Detection synth;
          synth.frame = prev.frame + step;
          synth.box.left = prev.box.left + w * (cur.box.left - prev.box.left);
          synth.box.top = prev.box.top + w * (cur.box.top - prev.box.top);
          synth.box.width = prev.box.width + w * (cur.box.width - prev.box.width);
          synth.box.height = prev.box.height + w * (cur.box.height - prev.box.height);
          synth.confidence = prev.confidence + w * (cur.confidence - prev.confidence);
          synth.interpolated = true;
          filled.detections.push_back(synth);
        }
      }
      filled.detections.push_back(cur);
    }
    out.trajectories.push_back(std::move(filled));
  }
  out.validate();
  return out;
}

}  // namespace sqe
