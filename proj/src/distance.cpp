#include "sqe/distance.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "sqe/rng.hpp"

namespace sqe {

double feature_distance(std::span<const double> f, std::span<const double> g) {
  if (f.size() != g.size()) {
    throw ValidationError("feature dimension mismatch: " + std::to_string(f.size()) +
                          " vs " + std::to_string(g.size()));
  }
  double ss = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    double d = f[k] - g[k];
    ss += d * d;
  }
  return std::sqrt(ss);
}

namespace {

// Feature-bearing detections of a trajectory, in frame order.
std::vector<const FeatureVec*> usable_features(const Trajectory& t) {
  std::vector<const FeatureVec*> out;
  out.reserve(t.detections.size());
  for (const auto& d : t.detections) {
    if (d.has_feature()) {
      out.push_back(&*d.feature);
    } else if (!d.interpolated) {
      throw ValidationError("trajectory " + std::to_string(t.id) +
                            ": detection at frame " + std::to_string(d.frame) +
                            " has no feature");
    }
  }
  return out;
}

// Chooses `count` distinct pair indices from [0, total) with a sparse
// Fisher-Yates pass; sorted so values keep a canonical order.
std::vector<std::size_t> choose_indices(std::size_t total, std::size_t count,
                                        std::uint64_t seed) {
  std::mt19937_64 eng = make_engine(seed);
  std::unordered_map<std::size_t, std::size_t> displaced;
  std::vector<std::size_t> picks;
  picks.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> dist(i, total - 1);
    std::size_t j = dist(eng);
    auto it_j = displaced.find(j);
    std::size_t value_j = it_j == displaced.end() ? j : it_j->second;
    auto it_i = displaced.find(i);
    std::size_t value_i = it_i == displaced.end() ? i : it_i->second;
    picks.push_back(value_j);
    displaced[j] = value_i;
  }
  std::sort(picks.begin(), picks.end());
  return picks;
}

}  // namespace

DistanceSamples intra_distances(const Trajectory& t, const PairSampling& sampling) {
  auto feats = usable_features(t);
  const std::size_t n = feats.size();
  DistanceSamples out;
  out.kind = PairKind::intra;
  out.first_id = t.id;
  out.second_id = t.id;
  out.source_pair_count = n < 2 ? 0 : n * (n - 1) / 2;
  if (out.source_pair_count == 0) return out;

  if (out.source_pair_count <= sampling.max_pairs) {
    out.values.reserve(out.source_pair_count);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        out.values.push_back(feature_distance(*feats[i], *feats[j]));
      }
    }
    return out;
  }

  out.subsampled = true;
  // Pair index k enumerates (i, j), i < j, row-major; row_start[i] is the
  // index of pair (i, i+1).
  std::vector<std::size_t> row_start(n - 1);
  std::size_t acc = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    row_start[i] = acc;
    acc += n - 1 - i;
  }
  auto picks = choose_indices(out.source_pair_count, sampling.max_pairs,
                              mix_seed(sampling.seed, 0x1a7ad15bULL,
                                       static_cast<std::uint64_t>(t.id)));
  out.values.reserve(picks.size());
  for (std::size_t k : picks) {
    auto it = std::upper_bound(row_start.begin(), row_start.end(), k);
    std::size_t i = static_cast<std::size_t>(it - row_start.begin()) - 1;
    std::size_t j = i + 1 + (k - row_start[i]);
    out.values.push_back(feature_distance(*feats[i], *feats[j]));
  }
  return out;
}

DistanceSamples inter_distances(const Trajectory& a, const Trajectory& b,
                                const PairSampling& sampling) {
  if (a.id == b.id) {
    throw ValidationError("inter_distances requires distinct trajectory ids");
  }
  auto fa = usable_features(a);
  auto fb = usable_features(b);
  DistanceSamples out;
  out.kind = PairKind::inter;
  out.first_id = std::min(a.id, b.id);
  out.second_id = std::max(a.id, b.id);
  out.source_pair_count = fa.size() * fb.size();
  if (out.source_pair_count == 0) return out;

  if (out.source_pair_count <= sampling.max_pairs) {
    out.values.reserve(out.source_pair_count);
    for (const auto* f : fa) {
      for (const auto* g : fb) out.values.push_back(feature_distance(*f, *g));
    }
    return out;
  }

  out.subsampled = true;
  // Seeded from the ordered id pair so (a, b) and (b, a) agree.
  auto picks = choose_indices(out.source_pair_count, sampling.max_pairs,
                              mix_seed(sampling.seed, 0x2c9e41f7ULL,
                                       static_cast<std::uint64_t>(out.first_id),
                                       static_cast<std::uint64_t>(out.second_id)));
  const bool swapped = a.id > b.id;
  const auto& rows = swapped ? fb : fa;
  const auto& cols = swapped ? fa : fb;
  out.values.reserve(picks.size());
  for (std::size_t k : picks) {
    std::size_t i = k / cols.size();
    std::size_t j = k % cols.size();
    out.values.push_back(feature_distance(*rows[i], *cols[j]));
  }
  return out;
}

}  // namespace sqe
