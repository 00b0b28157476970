#pragma once

#include <Eigen/Core>

#include <cstddef>

namespace radar_odom {

/// Row-major m x n grid, rows are azimuths and columns are range bins.
using Grid = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct CartesianPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const CartesianPoint&, const CartesianPoint&) = default;
};

/// Geometry of one full rotation of a scanning radar. Azimuth index 0 points
/// along +x and indices increase counter-clockwise.
struct SensorMeta {
  int num_azimuths = 100;
  int num_range_bins = 200;
  double range_resolution = 0.5;  // meters per bin
  double scan_period = 0.25;      // seconds per rotation

  /// Throws kContractViolation unless m >= 2, n >= 2 and both scalars are
  /// positive and finite.
  void validate() const;

  double azimuth_angle(int azimuth_index) const;
  double max_range() const { return num_range_bins * range_resolution; }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(num_azimuths) * static_cast<std::size_t>(num_range_bins);
  }

  friend bool operator==(const SensorMeta&, const SensorMeta&) = default;
};

/// Received power over azimuths x range bins. Immutable once built; the
/// constructor rejects negative or non-finite power and mismatched shapes.
class PolarScan {
 public:
  PolarScan(SensorMeta meta, Grid power, double timestamp);

  static PolarScan zeros(const SensorMeta& meta, double timestamp = 0.0);

  const SensorMeta& meta() const { return meta_; }
  const Grid& power() const { return power_; }
  double timestamp() const { return timestamp_; }
  double at(int azimuth, int range_bin) const { return power_(azimuth, range_bin); }

 private:
  SensorMeta meta_;
  Grid power_;
  double timestamp_;
};

/// Cartesian position of the center of bin (a, r) in the sensor frame.
CartesianPoint bin_to_point(int azimuth_index, int range_bin, const SensorMeta& meta);

double point_range(const CartesianPoint& p);

}  // namespace radar_odom
