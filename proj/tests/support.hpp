#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "radar_odom/keypoints.hpp"
#include "radar_odom/scan_model.hpp"

namespace radar_odom::testing {

// Small generator toolkit for property tests; every case derives its own
// engine from a case index so failures reproduce in isolation.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal(double sigma) { return std::normal_distribution<double>(0.0, sigma)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(engine_); }
  double angle() { return uniform(-std::numbers::pi, std::numbers::pi); }

  std::vector<CartesianPoint> points(int count, double radius) {
    std::vector<CartesianPoint> out;
    while (static_cast<int>(out.size()) < count) {
      const CartesianPoint p{uniform(-radius, radius), uniform(-radius, radius)};
      if (std::hypot(p.x, p.y) <= radius) out.push_back(p);
    }
    return out;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Keypoint set holding arbitrary Cartesian points. Indices are the nearest
// bins; only the points matter to the descriptor and matcher.
inline KeypointSet keypoint_set(const std::vector<CartesianPoint>& points, const SensorMeta& meta = {},
                                double timestamp = 0.0) {
  KeypointSet set;
  set.source_meta = meta;
  set.timestamp = timestamp;
  for (const CartesianPoint& p : points) {
    const double bearing = std::atan2(p.y, p.x);
    int a = static_cast<int>(std::lround(bearing / (2.0 * std::numbers::pi) * meta.num_azimuths));
    a = (a % meta.num_azimuths + meta.num_azimuths) % meta.num_azimuths;
    const int r = static_cast<int>(std::floor(point_range(p) / meta.range_resolution));
    set.keypoints.push_back({a, r, p, 1.0});
  }
  return set;
}

inline std::vector<CartesianPoint> points_of(const KeypointSet& set) {
  std::vector<CartesianPoint> out;
  for (const Keypoint& k : set.keypoints) out.push_back(k.point);
  return out;
}

}  // namespace radar_odom::testing
