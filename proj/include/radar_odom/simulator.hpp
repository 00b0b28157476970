#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "radar_odom/motion.hpp"
#include "radar_odom/scan_model.hpp"

namespace radar_odom {

struct Landmark {
  CartesianPoint position;  // world frame
  double reflectivity = 1.0;
};

/// Radar artifacts injected by render_scan. All-zero rates and scales give a
/// clean scan containing only landmark blobs.
struct ArtifactModel {
  double speckle_scale = 0.0;     // std-dev of the unit-mean multiplicative gamma noise
  double background_noise = 0.0;  // mean of the additive exponential noise floor
  double false_positive_rate = 0.0;  // expected spurious blobs per scan (Poisson)
  double false_positive_reflectivity = 1.0;
  double dropout_prob = 0.0;
  double beam_width_azimuths = 0.6;  // Gaussian sigma in azimuth bins
  double range_spread_bins = 0.6;    // Gaussian sigma in range bins

  void validate() const;
};

struct StampedPose {
  double timestamp = 0.0;
  Pose2 pose;
};

struct TrajectorySpec {
  std::vector<StampedPose> poses;

  /// At least one pose and strictly increasing timestamps.
  void validate() const;
};

enum class TrajectoryKind { kStraight, kArc, kRandomWalk };

TrajectoryKind parse_trajectory_kind(std::string_view name);
std::string_view to_string(TrajectoryKind kind);

/// Renders the scan observed by a sensor at `pose` (sensor frame in world
/// frame). Deterministic for a fixed seed. Landmark dropout, false positives
/// and noise draw from independent streams, so changing one artifact rate
/// never perturbs the others.
PolarScan render_scan(std::span<const Landmark> world, const Pose2& pose, const SensorMeta& meta,
                      const ArtifactModel& artifacts, std::uint64_t seed, double timestamp = 0.0);

/// One scan per trajectory pose, stamped with the pose's timestamp. Scan k
/// is rendered with seed `seed * 1000 + k`.
std::vector<PolarScan> render_sequence(std::span<const Landmark> world, const TrajectorySpec& trajectory,
                                       const SensorMeta& meta, const ArtifactModel& artifacts, std::uint64_t seed);

/// Pose sequence starting at the identity at t = 0, one pose every dt.
/// `steps` is the number of poses. Straight keeps heading, arc turns at a
/// constant yaw rate, and random-walk perturbs speed and yaw rate with
/// bounded random accelerations.
TrajectorySpec make_trajectory(TrajectoryKind kind, int steps, double speed, double yaw_rate, double dt,
                               std::uint64_t seed);

/// Continues `tail` from the last pose of `head`, dropping tail's first
/// (identity) pose so the join is seamless.
TrajectorySpec append_trajectory(const TrajectorySpec& head, const TrajectorySpec& tail);

/// Relative motion between consecutive poses, inverse(p_k) * p_{k+1}.
std::vector<Pose2> relative_motions(const TrajectorySpec& trajectory);

struct LandmarkField {
  CartesianPoint center;
  double min_radius = 5.0;
  double max_radius = 40.0;
  double min_separation = 3.0;
  double min_reflectivity = 0.5;
  double max_reflectivity = 1.5;
};

/// Uniformly scatters `count` landmarks over an annulus with a minimum
/// pairwise separation (rejection sampling, bounded attempts).
std::vector<Landmark> scatter_landmarks(int count, const LandmarkField& field, std::uint64_t seed);

}  // namespace radar_odom
