// Key-value run configuration with [sqe], [tracker] and [distance] sections.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "sqe/metric.hpp"
#include "sqe/tracker.hpp"

namespace sqe {

struct RunConfig {
  // [sqe]
  double delta_L = 15.0;
  double delta_D = 0.2;
  double delta_m = 0.3;
  double k1 = 1.0;
  double k2_reid = 2.0;
  double k2_merge = 10.0;
  // [tracker]
  std::int64_t max_gap = 30;
  // [distance]
  std::size_t max_pairs = 10000;
  bool normalize = false;

  SqeParams sqe_params(double k2) const {
    return SqeParams{delta_L, delta_D, delta_m, k1, k2};
  }
};

RunConfig parse_config_text(const std::string& text, const std::string& origin = "<text>");
RunConfig load_config(const std::filesystem::path& path);

}  // namespace sqe
