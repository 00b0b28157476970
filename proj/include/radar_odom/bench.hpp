#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace radar_odom {

struct BenchConfig {
  std::vector<int> l_max_sweep{250, 500, 1000};
  // (azimuths, range bins) for the extraction sweep.
  std::vector<std::pair<int, int>> grid_sweep{{50, 100}, {100, 200}, {200, 400}};
  int extraction_l_max = 200;
  int repeats = 3;  // best-of timing
  std::uint64_t seed = 7;

  void validate() const;
};

struct AssociationTiming {
  int l_max = 0;
  int keypoints_a = 0;
  int keypoints_b = 0;
  int candidates = 0;
  int matches = 0;
  double seconds_extract = 0.0;
  double seconds_associate = 0.0;
  double seconds_motion = 0.0;
};

struct ExtractionTiming {
  int azimuths = 0;
  int range_bins = 0;
  int keypoints = 0;
  double seconds = 0.0;
};

struct BenchReport {
  std::vector<AssociationTiming> association;
  std::vector<ExtractionTiming> extraction;
  double association_slope = 0.0;  // d log(t_DA) / d log(l_max)
  double extraction_slope = 0.0;   // d log(t_KE) / d log(m n)
};

/// Least-squares slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

/// Times each pipeline stage on a fixed, cluttered synthetic scene across
/// an l_max sweep (data association) and a grid-size sweep (extraction).
/// Each sweep needs at least 3 points; throws kConfig otherwise.
BenchReport run_complexity_bench(const BenchConfig& cfg);

}  // namespace radar_odom
