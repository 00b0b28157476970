#pragma once

#include <span>
#include <vector>

#include "radar_odom/keypoints.hpp"
#include "radar_odom/motion.hpp"
#include "radar_odom/odometry.hpp"

namespace radar_odom {

struct IcpConfig {
  double nn_radius = 2.0;           // meters
  double convergence_tol = 1e-5;    // relative change of the mean squared residual
  int max_iterations = 50;
  Pose2 initial_guess;              // maps L1 coordinates into L2 coordinates

  void validate() const;
};

struct IcpResult {
  Pose2 transform;  // L1 -> L2
  int iterations = 0;
  int inliers = 0;
  double residual_rms = 0.0;
  bool converged = false;
  std::vector<double> mean_squared_residuals;  // one per iteration, after re-estimation
};

/// Point-to-point ICP: move L1 by the current estimate, pair every point with
/// its nearest L2 neighbour within nn_radius (brute force), refit SE(2) on
/// the pairs, repeat until the mean squared residual changes by less than
/// convergence_tol (relative) or max_iterations is hit. Throws kIcpDiverged
/// when an iteration finds fewer than two pairs.
IcpResult icp_match(const KeypointSet& l1, const KeypointSet& l2, const IcpConfig& cfg);

/// Scan-to-scan odometry with ICP on already extracted keypoints. Each pair
/// starts from the previous estimate (constant velocity), the first from
/// cfg.initial_guess. Diverged pairs fall back to the previous relative pose.
OdometryResult run_icp_odometry(std::span<const KeypointSet> sets, const IcpConfig& cfg);

}  // namespace radar_odom
