// Shared test utilities: temp files, random domain-object generators and
// the independent brute-force oracles the suites check against.
#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "sqe/assignment.hpp"
#include "sqe/rng.hpp"
#include "sqe/types.hpp"

namespace sqe::testing {

class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("sqe_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline FeatureVec constant_feature(std::size_t dim, double value) {
  return FeatureVec(dim, value);
}

inline Detection make_detection(std::int64_t frame, double x, double y,
                                std::optional<FeatureVec> feature = {}) {
  Detection d;
  d.frame = frame;
  d.box = Box{x, y, 30.0, 60.0};
  d.confidence = 1.0;
  d.feature = std::move(feature);
  return d;
}

inline Trajectory make_trajectory(std::int64_t id,
                                  const std::vector<FeatureVec>& features,
                                  std::int64_t first_frame = 0) {
  Trajectory t;
  t.id = id;
  for (std::size_t i = 0; i < features.size(); ++i) {
    t.detections.push_back(make_detection(first_frame + static_cast<std::int64_t>(i),
                                          10.0 * static_cast<double>(i), 50.0,
                                          features[i]));
  }
  return t;
}

inline TrackSet random_trackset(std::uint64_t seed, std::size_t n_trajectories,
                                std::size_t max_len = 12, std::size_t dim = 4) {
  auto eng = make_engine(seed);
  std::uniform_int_distribution<std::size_t> len_dist(1, max_len);
  std::uniform_int_distribution<std::int64_t> frame_dist(0, 5);
  std::uniform_real_distribution<double> coord(0.0, 500.0);
  std::uniform_real_distribution<double> feat(-1.0, 1.0);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  TrackSet ts;
  ts.feature_dim = dim;
  for (std::size_t i = 0; i < n_trajectories; ++i) {
    Trajectory t;
    t.id = static_cast<std::int64_t>(i * 2);  // ids need not be dense
    std::int64_t frame = frame_dist(eng);
    std::size_t len = len_dist(eng);
    for (std::size_t k = 0; k < len; ++k) {
      Detection d;
      d.frame = frame;
      d.box = Box{coord(eng), coord(eng), 1.0 + coord(eng) / 10.0, 1.0 + coord(eng) / 10.0};
      d.confidence = conf(eng);
      FeatureVec f(dim);
      for (double& v : f) v = feat(eng);
      d.feature = std::move(f);
      t.detections.push_back(std::move(d));
      frame += 1 + frame_dist(eng);
    }
    ts.trajectories.push_back(std::move(t));
  }
  return ts;
}

inline bool detections_equal(const Detection& a, const Detection& b) {
  return a.frame == b.frame && a.box.left == b.box.left && a.box.top == b.box.top &&
         a.box.width == b.box.width && a.box.height == b.box.height &&
         a.confidence == b.confidence && a.interpolated == b.interpolated &&
         a.feature == b.feature;
}

inline bool tracksets_equal(const TrackSet& a, const TrackSet& b) {
  if (a.size() != b.size() || a.feature_dim != b.feature_dim) return false;
  auto sorted_ids = [](const TrackSet& ts) {
    std::vector<const Trajectory*> v;
    for (const auto& t : ts.trajectories) v.push_back(&t);
    std::sort(v.begin(), v.end(),
              [](const Trajectory* x, const Trajectory* y) { return x->id < y->id; });
    return v;
  };
  auto va = sorted_ids(a);
  auto vb = sorted_ids(b);
  for (std::size_t i = 0; i < va.size(); ++i) {
    if (va[i]->id != vb[i]->id || va[i]->length() != vb[i]->length()) return false;
    for (std::size_t k = 0; k < va[i]->detections.size(); ++k) {
      if (!detections_equal(va[i]->detections[k], vb[i]->detections[k])) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Brute-force assignment oracle: enumerates matchings row by row and keeps
// the best under (max cardinality, min cost, lexicographically smallest
// pair list). Exponential; intended for matrices up to ~9x9.

struct OracleSolution {
  std::size_t cardinality = 0;
  double cost = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

namespace detail {

inline void oracle_dfs(const AssignmentProblem& p, std::size_t row,
                       std::vector<char>& col_used, std::size_t card, double cost,
                       std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                       OracleSolution& best) {
  if (row == p.rows) {
    bool better = false;
    if (card > best.cardinality) {
      better = true;
    } else if (card == best.cardinality) {
      if (cost < best.cost - 1e-12) {
        better = true;
      } else if (cost <= best.cost + 1e-12 && pairs < best.pairs) {
        better = true;
      }
    }
    if (better) best = OracleSolution{card, cost, pairs};
    return;
  }
  // Prune: even matching every remaining row cannot reach the best.
  if (card + (p.rows - row) < best.cardinality) return;
  for (std::size_t c = 0; c < p.cols; ++c) {
    if (col_used[c] || !p.is_allowed(row, c)) continue;
    col_used[c] = 1;
    pairs.emplace_back(row, c);
    oracle_dfs(p, row + 1, col_used, card + 1, cost + p.cost_at(row, c), pairs, best);
    pairs.pop_back();
    col_used[c] = 0;
  }
  oracle_dfs(p, row + 1, col_used, card, cost, pairs, best);
}

}  // namespace detail

inline OracleSolution assignment_oracle(const AssignmentProblem& p) {
  OracleSolution best;
  best.cost = 1e300;
  best.cardinality = 0;
  std::vector<char> col_used(p.cols, 0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  detail::oracle_dfs(p, 0, col_used, 0, 0.0, pairs, best);
  return best;
}

// ---------------------------------------------------------------------------
// Exhaustive truth-to-result oracle: enumerates every injective partial
// mapping of ground-truth trajectories onto hypothesis trajectories and
// maximizes the total number of IOU-matched frames (= IDTP).

namespace detail {

inline void id_oracle_dfs(const std::vector<std::vector<std::int64_t>>& overlap,
                          std::size_t g, std::vector<char>& used,
                          std::int64_t acc, std::int64_t& best) {
  if (g == overlap.size()) {
    best = std::max(best, acc);
    return;
  }
  id_oracle_dfs(overlap, g + 1, used, acc, best);  // leave g unmatched
  for (std::size_t h = 0; h < used.size(); ++h) {
    if (used[h] || overlap[g][h] == 0) continue;
    used[h] = 1;
    id_oracle_dfs(overlap, g + 1, used, acc + overlap[g][h], best);
    used[h] = 0;
  }
}

}  // namespace detail

struct IdOracleCounts {
  std::int64_t idtp = 0, idfp = 0, idfn = 0;
};

inline IdOracleCounts id_metrics_oracle(const TrackSet& gt, const TrackSet& hyp,
                                        double iou_threshold,
                                        double (*iou)(const Box&, const Box&)) {
  std::vector<std::vector<std::int64_t>> overlap(
      gt.size(), std::vector<std::int64_t>(hyp.size(), 0));
  std::int64_t total_gt = 0, total_hyp = 0;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    total_gt += static_cast<std::int64_t>(gt.trajectories[g].length());
    for (std::size_t h = 0; h < hyp.size(); ++h) {
      for (const auto& dg : gt.trajectories[g].detections) {
        for (const auto& dh : hyp.trajectories[h].detections) {
          if (dg.frame == dh.frame && iou(dg.box, dh.box) >= iou_threshold) {
            ++overlap[g][h];
          }
        }
      }
    }
  }
  for (const auto& t : hyp.trajectories) total_hyp += static_cast<std::int64_t>(t.length());
  std::int64_t best = 0;
  std::vector<char> used(hyp.size(), 0);
  detail::id_oracle_dfs(overlap, 0, used, 0, best);
  return IdOracleCounts{best, total_hyp - best, total_gt - best};
}

inline AssignmentProblem random_assignment_problem(std::uint64_t seed,
                                                   std::size_t max_dim = 9,
                                                   bool integer_costs = true,
                                                   double forbid_prob = 0.25) {
  auto eng = make_engine(seed);
  std::uniform_int_distribution<std::size_t> dim(1, max_dim);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> int_cost(0, 20);
  AssignmentProblem p;
  p.rows = dim(eng);
  p.cols = dim(eng);
  p.cost.resize(p.rows * p.cols);
  p.allowed.resize(p.rows * p.cols);
  for (std::size_t i = 0; i < p.cost.size(); ++i) {
    p.cost[i] = integer_costs ? static_cast<double>(int_cost(eng)) : unit(eng) * 20.0;
    p.allowed[i] = unit(eng) < forbid_prob ? 0 : 1;
  }
  return p;
}

}  // namespace sqe::testing
