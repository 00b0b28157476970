#include "radar_odom/motion.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "radar_odom/error.hpp"

namespace radar_odom {

double normalize_angle(double theta) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(theta, kTwoPi);  // [-pi, pi]
  if (wrapped <= -std::numbers::pi) wrapped += kTwoPi;
  return wrapped;
}

CartesianPoint Pose2::apply(const CartesianPoint& p) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * p.x - s * p.y + x, s * p.x + c * p.y + y};
}

double Pose2::translation_norm() const { return std::hypot(x, y); }

Pose2 compose(const Pose2& a, const Pose2& b) {
  const CartesianPoint t = a.apply({b.x, b.y});
  return {t.x, t.y, a.theta + b.theta};
}

Pose2 inverse(const Pose2& a) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return {-(c * a.x + s * a.y), -(-s * a.x + c * a.y), -a.theta};
}

Pose2 estimate_se2(std::span<const PointPair> pairs) {
  if (pairs.size() < 2) throw_error(ErrorCode::kUnderdetermined, "estimate_se2 needs at least 2 point pairs");

  Eigen::Vector2d source_mean = Eigen::Vector2d::Zero();
  Eigen::Vector2d target_mean = Eigen::Vector2d::Zero();
  for (const auto& pair : pairs) {
    source_mean += Eigen::Vector2d(pair.source.x, pair.source.y);
    target_mean += Eigen::Vector2d(pair.target.x, pair.target.y);
  }
  const double count = static_cast<double>(pairs.size());
  source_mean /= count;
  target_mean /= count;

  Eigen::Matrix2d cross = Eigen::Matrix2d::Zero();
  double source_spread = 0.0;
  double source_scale = 0.0;
  for (const auto& pair : pairs) {
    const Eigen::Vector2d s = Eigen::Vector2d(pair.source.x, pair.source.y) - source_mean;
    const Eigen::Vector2d t = Eigen::Vector2d(pair.target.x, pair.target.y) - target_mean;
    cross += s * t.transpose();
    source_spread += s.squaredNorm();
    source_scale += pair.source.x * pair.source.x + pair.source.y * pair.source.y;
  }
  if (source_spread <= 1e-24 * std::max(1.0, source_scale)) {
    throw_error(ErrorCode::kDegenerateGeometry, "estimate_se2: all source points coincide");
  }

  const Eigen::JacobiSVD<Eigen::Matrix2d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix2d& u = svd.matrixU();
  const Eigen::Matrix2d& v = svd.matrixV();
  Eigen::Matrix2d correction = Eigen::Matrix2d::Identity();
  correction(1, 1) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Eigen::Matrix2d rotation = v * correction * u.transpose();
  const Eigen::Vector2d translation = target_mean - rotation * source_mean;

  return {translation.x(), translation.y(), std::atan2(rotation(1, 0), rotation(0, 0))};
}

double alignment_rms(const Pose2& transform, std::span<const PointPair> pairs) {
  if (pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& pair : pairs) {
    const CartesianPoint moved = transform.apply(pair.source);
    const double dx = moved.x - pair.target.x;
    const double dy = moved.y - pair.target.y;
    sum += dx * dx + dy * dy;
  }
  return std::sqrt(sum / static_cast<double>(pairs.size()));
}

}  // namespace radar_odom
