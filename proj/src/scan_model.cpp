#include "radar_odom/scan_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "radar_odom/error.hpp"

namespace radar_odom {

void SensorMeta::validate() const {
  require(num_azimuths >= 2, "SensorMeta: num_azimuths must be >= 2");
  require(num_range_bins >= 2, "SensorMeta: num_range_bins must be >= 2");
  require(std::isfinite(range_resolution) && range_resolution > 0.0,
          "SensorMeta: range_resolution must be positive");
  require(std::isfinite(scan_period) && scan_period > 0.0, "SensorMeta: scan_period must be positive");
}

double SensorMeta::azimuth_angle(int azimuth_index) const {
  return 2.0 * std::numbers::pi * static_cast<double>(azimuth_index) / static_cast<double>(num_azimuths);
}

PolarScan::PolarScan(SensorMeta meta, Grid power, double timestamp)
    : meta_(meta), power_(std::move(power)), timestamp_(timestamp) {
  meta_.validate();
  require(power_.rows() == meta_.num_azimuths && power_.cols() == meta_.num_range_bins,
          "PolarScan: power grid shape does not match sensor meta");
  require(std::isfinite(timestamp_), "PolarScan: timestamp must be finite");
  for (Eigen::Index i = 0; i < power_.size(); ++i) {
    const double v = power_.data()[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw_error(ErrorCode::kContractViolation,
                  "PolarScan: power values must be finite and non-negative (cell " + std::to_string(i) + ")");
    }
  }
}

PolarScan PolarScan::zeros(const SensorMeta& meta, double timestamp) {
  meta.validate();
  return PolarScan(meta, Grid::Zero(meta.num_azimuths, meta.num_range_bins), timestamp);
}

CartesianPoint bin_to_point(int azimuth_index, int range_bin, const SensorMeta& meta) {
  require(azimuth_index >= 0 && azimuth_index < meta.num_azimuths, "bin_to_point: azimuth index out of range");
  require(range_bin >= 0 && range_bin < meta.num_range_bins, "bin_to_point: range bin out of range");
  const double range = (static_cast<double>(range_bin) + 0.5) * meta.range_resolution;
  const double angle = meta.azimuth_angle(azimuth_index);
  return {range * std::cos(angle), range * std::sin(angle)};
}

double point_range(const CartesianPoint& p) { return std::hypot(p.x, p.y); }

}  // namespace radar_odom
