#include "radar_odom/icp.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "radar_odom/error.hpp"

namespace radar_odom {

void IcpConfig::validate() const {
  require(std::isfinite(nn_radius) && nn_radius > 0.0, "IcpConfig: nn_radius must be positive");
  require(std::isfinite(convergence_tol) && convergence_tol > 0.0, "IcpConfig: convergence_tol must be positive");
  require(max_iterations >= 1, "IcpConfig: max_iterations must be >= 1");
}

IcpResult icp_match(const KeypointSet& l1, const KeypointSet& l2, const IcpConfig& cfg) {
  cfg.validate();
  require(!l1.empty() && !l2.empty(), "icp_match: both keypoint sets must be non-empty");
  const double radius_sq = cfg.nn_radius * cfg.nn_radius;

  IcpResult out;
  out.transform = cfg.initial_guess;
  std::vector<PointPair> pairs;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    pairs.clear();
    for (const Keypoint& source : l1.keypoints) {
      const CartesianPoint moved = out.transform.apply(source.point);
      double best = std::numeric_limits<double>::infinity();
      const Keypoint* nearest = nullptr;
      for (const Keypoint& target : l2.keypoints) {
        const double dx = target.point.x - moved.x;
        const double dy = target.point.y - moved.y;
        const double d_sq = dx * dx + dy * dy;
        if (d_sq < best) {
          best = d_sq;
          nearest = &target;
        }
      }
      if (nearest != nullptr && best <= radius_sq) pairs.push_back({source.point, nearest->point});
    }
    if (pairs.size() < 2) {
      throw_error(ErrorCode::kIcpDiverged, "iteration " + std::to_string(it) + " found " +
                                               std::to_string(pairs.size()) + " nearest-neighbour pairs");
    }

    out.transform = estimate_se2(pairs);
    const double rms = alignment_rms(out.transform, pairs);
    const double mse = rms * rms;
    out.iterations = it;
    out.inliers = static_cast<int>(pairs.size());
    out.residual_rms = rms;
    const bool first = out.mean_squared_residuals.empty();
    const double previous = first ? 0.0 : out.mean_squared_residuals.back();
    out.mean_squared_residuals.push_back(mse);
    if (mse <= 1e-24 || (!first && std::abs(previous - mse) <= cfg.convergence_tol * std::max(previous, 1e-300))) {
      out.converged = true;
      break;
    }
  }
  return out;
}

OdometryResult run_icp_odometry(std::span<const KeypointSet> sets, const IcpConfig& cfg) {
  cfg.validate();
  require(sets.size() >= 2, "run_icp_odometry: at least 2 scans required");
  OdometryResult out;
  out.method = "icp";
  Pose2 previous = inverse(cfg.initial_guess);  // as b-in-a pose
  for (std::size_t k = 0; k + 1 < sets.size(); ++k) {
    const KeypointSet& a = sets[k];
    const KeypointSet& b = sets[k + 1];
    require(b.timestamp > a.timestamp, "run_icp_odometry: timestamps must strictly increase");
    RelativePose entry{a.timestamp, b.timestamp, previous, {}};
    entry.diagnostics.keypoints_a = static_cast<int>(a.size());
    entry.diagnostics.keypoints_b = static_cast<int>(b.size());
    const auto start = std::chrono::steady_clock::now();
    try {
      IcpConfig pair_cfg = cfg;
      pair_cfg.initial_guess = inverse(previous);
      const IcpResult icp = icp_match(a, b, pair_cfg);
      entry.pose = inverse(icp.transform);
      entry.diagnostics.matches = icp.inliers;
      entry.diagnostics.candidates = icp.inliers;
      entry.diagnostics.residual_rms = icp.residual_rms;
      entry.diagnostics.eigen_iterations = icp.iterations;
    } catch (const Error& error) {
      if (error.code() != ErrorCode::kIcpDiverged && error.code() != ErrorCode::kDegenerateGeometry) throw;
      entry.diagnostics.failed = true;
      entry.diagnostics.fallback = true;
      entry.diagnostics.failure_reason = error.what();
    }
    entry.diagnostics.seconds_associate =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    previous = entry.pose;
    out.relative_poses.push_back(std::move(entry));
  }
  out.trajectory = accumulate(out.relative_poses);
  return out;
}

}  // namespace radar_odom
