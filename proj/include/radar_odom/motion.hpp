#pragma once

#include <span>

#include "radar_odom/scan_model.hpp"

namespace radar_odom {

/// Wraps an angle into (-pi, pi].
double normalize_angle(double theta);

/// Planar rigid-body transform. Acting on a point p it yields R(theta) p + t.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2() = default;
  Pose2(double x_, double y_, double theta_) : x(x_), y(y_), theta(normalize_angle(theta_)) {}

  static Pose2 identity() { return {}; }

  CartesianPoint apply(const CartesianPoint& p) const;
  double translation_norm() const;

  friend bool operator==(const Pose2&, const Pose2&) = default;
};

/// a * b: first b, then a.
Pose2 compose(const Pose2& a, const Pose2& b);
Pose2 inverse(const Pose2& a);

struct PointPair {
  CartesianPoint source;
  CartesianPoint target;
};

/// Least-squares SE(2) transform T minimising sum |T(source) - target|^2,
/// via the SVD of the 2x2 cross-covariance with a reflection guard.
/// Throws kUnderdetermined for fewer than two pairs and kDegenerateGeometry
/// when all source points coincide.
Pose2 estimate_se2(std::span<const PointPair> pairs);

/// Root-mean-square of |T(source) - target| over the pairs (0 if empty).
double alignment_rms(const Pose2& transform, std::span<const PointPair> pairs);

}  // namespace radar_odom
