#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radar_odom/descriptor.hpp"
#include "radar_odom/error.hpp"
#include "radar_odom/graph_match.hpp"
#include "radar_odom/keypoints.hpp"
#include "radar_odom/motion.hpp"
#include "radar_odom/simulator.hpp"

namespace radar_odom {

struct MotionPrior {
  enum class Kind { kNone, kMaxAccel };
  Kind kind = Kind::kNone;
  double max_accel = 8.0;  // m/s^2
};

struct PipelineConfig {
  int l_max = 1000;
  int alpha = 0;          // 0: one slice per azimuth
  int rho = 0;            // 0: one annulus per range bin
  double sigma_c = 0.0;   // 0: range resolution
  MotionPrior prior;
  double gate_margin = 1.0;  // meters added to the acceleration gate radius

  void validate() const;
  DescriptorParams descriptor_params(const SensorMeta& meta) const;
  double compatibility_sigma(const SensorMeta& meta) const;
};

struct Velocity {
  double linear = 0.0;   // m/s
  double angular = 0.0;  // rad/s
};

struct PairDiagnostics {
  int keypoints_a = 0;
  int keypoints_b = 0;
  int candidates = 0;  // u
  int matches = 0;     // |M|
  double mutual_compatibility = 0.0;
  double eigengap = 0.0;
  double residual_rms = 0.0;
  int eigen_iterations = 0;
  bool swapped = false;
  std::optional<double> gate_radius;
  double seconds_extract = 0.0;
  double seconds_associate = 0.0;
  double seconds_motion = 0.0;
  bool failed = false;
  bool fallback = false;  // pose is a constant-velocity substitute
  std::string failure_reason;

  double seconds_total() const { return seconds_extract + seconds_associate + seconds_motion; }
};

struct PairResult {
  Pose2 pose;  // scan_b's frame expressed in scan_a's frame
  PairDiagnostics diagnostics;
};

/// Raised when a pair cannot be matched; carries the partial diagnostics.
class MatchFailure : public Error {
 public:
  MatchFailure(const std::string& what, PairDiagnostics diagnostics);
  const PairDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  PairDiagnostics diagnostics_;
};

/// Gate radius for the acceleration prior: |v| dt + a_max dt^2 / 2 + margin.
double acceleration_gate(const PipelineConfig& cfg, std::optional<Velocity> previous, double dt);

/// Data association and motion estimation between two extracted keypoint
/// sets. The smaller set is matched into the larger one; the returned pose
/// is always that of b's frame in a's frame.
PairResult match_keypoint_sets(const KeypointSet& a, const KeypointSet& b, const PipelineConfig& cfg,
                               std::optional<Velocity> previous = std::nullopt);

PairResult match_scan_pair(const PolarScan& scan_a, const PolarScan& scan_b, const PipelineConfig& cfg,
                           std::optional<Velocity> previous = std::nullopt);

struct RelativePose {
  double timestamp_a = 0.0;
  double timestamp_b = 0.0;
  Pose2 pose;
  PairDiagnostics diagnostics;
};

struct OdometryResult {
  std::string method = "ro";
  std::vector<RelativePose> relative_poses;
  std::vector<StampedPose> trajectory;

  /// trajectory[k + 1] == compose(trajectory[k], relative_poses[k].pose).
  bool is_consistent(double tolerance = 1e-9) const;
};

/// Builds the accumulated trajectory from relative poses, starting at the
/// identity at the first pair's timestamp_a.
std::vector<StampedPose> accumulate(std::span<const RelativePose> relative);

/// Runs the pipeline over consecutive scans. A failed pair is flagged and
/// replaced by the previous relative pose (identity if none). Without a
/// motion prior, pairs are independent and run on up to `workers` threads;
/// the result does not depend on the worker count.
OdometryResult run_odometry(std::span<const PolarScan> scans, const PipelineConfig& cfg, int workers = 1);

/// Same, for keypoint sets that are already extracted.
OdometryResult run_odometry(std::span<const KeypointSet> sets, const PipelineConfig& cfg, int workers = 1);

struct EvaluationMetrics {
  int pairs = 0;
  int failures = 0;
  double translation_median = 0.0;  // meters
  double translation_std = 0.0;
  double rotation_median = 0.0;     // radians
  double rotation_std = 0.0;
  double mean_mutual_compatibility = 0.0;
  double mean_eigengap = 0.0;
  double time_p50 = 0.0;  // seconds per pair
  double time_p90 = 0.0;
  double time_max = 0.0;
  std::vector<double> translation_errors;  // successful pairs, in pair order
  std::vector<double> rotation_errors;
};

/// Per-pair errors between estimated and true relative motion (Euclidean
/// translation difference, absolute wrapped angle difference). Statistics
/// cover successful pairs; failures are counted separately. Throws
/// kTimestampMismatch when the pairs do not line up with the truth.
EvaluationMetrics evaluate(const OdometryResult& result, const TrajectorySpec& truth);

double median(std::vector<double> values);
double sample_std(std::span<const double> values);

}  // namespace radar_odom
