// Synthetic scenario generation under the Gaussian feature model
// z ~ N(mu, diag(sigma^2)) with controlled corruptions (identity switches,
// false alarms, fragmentation), plus statistical verification that
// standardized feature distances follow the chi distribution.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sqe/gmm.hpp"
#include "sqe/types.hpp"

namespace sqe::synth {

struct TargetModel {
  std::int64_t id = 0;
  FeatureVec mu;              // ideal feature
  std::vector<double> sigma;  // per-dimension std, entries > 0
  std::int64_t first_frame = 0;
  std::int64_t last_frame = 0;
  Box start_box{0.0, 0.0, 30.0, 60.0};
  double vx = 2.0;
  double vy = 0.0;

  Box box_at(std::int64_t frame) const {
    double dt = static_cast<double>(frame - first_frame);
    return Box{start_box.left + vx * dt, start_box.top + vy * dt,
               start_box.width, start_box.height};
  }
};

struct Corruption {
  enum class Kind { identity_switch, false_alarm, fragmentation };
  Kind kind = Kind::identity_switch;
  std::int64_t track = 0;      // identity_switch, fragmentation
  std::int64_t at_frame = 0;   // identity_switch, fragmentation
  std::int64_t to_target = 0;  // identity_switch
  std::int64_t length = 8;     // false_alarm
  double sigma_scale = 5.0;    // false_alarm
};

struct Scenario {
  std::uint64_t seed = 0;
  std::size_t feature_dim = 128;
  double dropout = 0.0;  // per-detection miss probability
  std::vector<TargetModel> targets;
  std::vector<Corruption> corruptions;

  void validate() const;
};

struct GeneratedScene {
  GroundTruth truth;       // box-only, one trajectory per target
  DetectionStream stream;  // tracker input (includes false-alarm boxes)
  TrackSet hypothesis;     // per-target trajectories with corruptions applied
};

/// Fully determined by the scenario (including its seed). Identity switches
/// and fragmentation rearrange existing detections; false alarms add new
/// trajectories drawn with an inflated sigma; none of them perturb the
/// feature draws of untouched targets.
GeneratedScene generate(const Scenario& sc);

struct ChiCheckResult {
  double ks_statistic = 0.0;
  double p_value = 1.0;
  std::size_t sample_count = 0;
  std::size_t dof = 0;
};

/// Knobs for the negative controls: standardize with a scaled sigma, or
/// omit the cross-target mean-shift correction.
struct StandardizeOverride {
  double sigma_multiplier = 1.0;
  bool drop_mean_shift = false;
};

/// Draws feature pairs from the single target of `sc`, standardizes the
/// per-dimension differences by sqrt(2 sigma_k^2) and KS-tests the result
/// against chi with feature_dim degrees of freedom. samples >= 100.
ChiCheckResult chi_check_intra(const Scenario& sc, std::size_t samples,
                               const StandardizeOverride& override_ = {});

/// Cross-target pairs standardized by the mean shift and combined sigma.
ChiCheckResult chi_check_inter(const TargetModel& a, const TargetModel& b,
                               std::size_t samples, std::uint64_t seed = 0,
                               const StandardizeOverride& override_ = {});

struct BimodalitySpec {
  std::size_t length_a = 50;
  std::size_t length_b = 50;
  double separation = 1.0;
  double sigma = 0.05;
  std::size_t feature_dim = 128;
  std::uint64_t seed = 0;
};

struct BimodalityDemo {
  DistanceSamples samples;
  GmmFit fit;
};

/// Builds one switched trajectory (length_a frames of target A followed by
/// length_b frames of a target separated by `separation`), returning its
/// intra distances and their two-component fit.
BimodalityDemo bimodality_demo(const BimodalitySpec& spec);

// Scenario files: key-value sections, one [target] / [corruption] block per
// entry, with an explicit top-level seed. See README for the format.
Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<text>");
Scenario load_scenario(const std::filesystem::path& path);

/// Convenience builder for randomized multi-target scenes: feature means on
/// a sphere of radius mean_radius, per-target sigma in [sigma_lo, sigma_hi],
/// staggered lifespans on separated lanes.
struct RandomScenarioSpec {
  std::uint64_t seed = 0;
  std::size_t targets = 5;
  std::int64_t frames = 300;
  std::size_t feature_dim = 128;
  double sigma_lo = 0.04;
  double sigma_hi = 0.06;
  double mean_radius = 0.7;
  double dropout = 0.05;
  bool stagger = true;
};

Scenario random_scenario(const RandomScenarioSpec& spec);

}  // namespace sqe::synth
