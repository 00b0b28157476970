#pragma once

#include <vector>

#include "radar_odom/scan_model.hpp"

namespace radar_odom {

struct Keypoint {
  int azimuth_index = 0;
  int range_bin = 0;
  CartesianPoint point;  // sensor frame
  double strength = 0.0;  // value of the rescaled scan H at the keypoint
};

struct KeypointSet {
  std::vector<Keypoint> keypoints;
  SensorMeta source_meta;
  double timestamp = 0.0;

  std::size_t size() const { return keypoints.size(); }
  bool empty() const { return keypoints.empty(); }
};

using MarkGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Full state of one extraction, exposed for inspection and tests.
struct KeypointExtraction {
  KeypointSet keypoints;
  Grid gradient;     // normalized Prewitt magnitude G
  Grid rescaled;     // H = (1 - G) * (S - mean(S))
  MarkGrid marked;   // R after the marking loop
  int region_count = 0;
};

/// Prewitt gradient magnitude divided by its maximum, so values lie in
/// [0, 1]. Azimuths wrap; range edges replicate. A constant scan yields 0.
Grid gradient_magnitude(const PolarScan& scan);

/// Gradient-scaled peak extraction with at most `l_max` marked regions.
///
/// Cells are visited in descending H (ties by azimuth, then range). Each
/// unmarked cell marks the inclusive interval between the nearest bins
/// below and above it whose mean-removed power is negative (clamped to the
/// scan edges), and counts a new region when nothing in that interval was
/// marked before. Marking stops after `l_max` regions, once every cell is
/// marked, or once the remaining cells all have H <= 0. Every maximal
/// marked run on an azimuth that overlaps a marked cell on a neighbouring
/// azimuth contributes its highest-H cell, provided that H is positive.
///
/// Regions live on a single azimuth and every marked run contains at least
/// one counted region, so the output never holds more than `l_max` points.
KeypointExtraction extract_keypoints_detailed(const PolarScan& scan, int l_max);

KeypointSet extract_keypoints(const PolarScan& scan, int l_max);

}  // namespace radar_odom
