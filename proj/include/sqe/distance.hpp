// Euclidean feature distances and intra/inter trajectory distance samples.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sqe/types.hpp"

namespace sqe {

enum class PairKind { intra, inter };

/// Pair sampling policy. Pair sets larger than max_pairs are reduced to a
/// uniform random subsample drawn with an engine seeded from
/// (seed, trajectory id(s)), so results do not depend on evaluation order.
struct PairSampling {
  std::size_t max_pairs = 10000;
  std::uint64_t seed = 0;

  static PairSampling unlimited(std::uint64_t seed = 0) {
    return PairSampling{static_cast<std::size_t>(-1), seed};
  }
};

struct DistanceSamples {
  std::vector<double> values;
  PairKind kind = PairKind::intra;
  std::int64_t first_id = 0;
  std::int64_t second_id = 0;  // equals first_id for intra samples
  bool subsampled = false;
  std::size_t source_pair_count = 0;
};

/// ||f - g||_2. Throws ValidationError on dimension mismatch.
double feature_distance(std::span<const double> f, std::span<const double> g);

/// Distances over all unordered detection pairs of one trajectory.
/// Interpolated detections are skipped; any other detection without a
/// feature is a validation error. Fewer than two feature-bearing
/// detections yield empty samples.
DistanceSamples intra_distances(const Trajectory& t, const PairSampling& sampling = {});

/// Distances over all cross pairs of two trajectories (ids must differ).
DistanceSamples inter_distances(const Trajectory& a, const Trajectory& b,
                                const PairSampling& sampling = {});

}  // namespace sqe
