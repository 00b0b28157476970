#include "radar_odom/odometry.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace radar_odom {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

[[noreturn]] void fail(const std::string& reason, PairDiagnostics& diagnostics) {
  diagnostics.failed = true;
  diagnostics.failure_reason = reason;
  throw MatchFailure(reason, diagnostics);
}

double pair_dt(const KeypointSet& a, const KeypointSet& b) {
  const double dt = b.timestamp - a.timestamp;
  return dt > 0.0 ? dt : a.source_meta.scan_period;
}

Velocity velocity_from(const Pose2& relative, double dt) {
  return {relative.translation_norm() / dt, relative.theta / dt};
}

struct PairOutcome {
  std::optional<PairResult> result;
  PairDiagnostics failure;
};

PairOutcome try_match(const KeypointSet& a, const KeypointSet& b, const PipelineConfig& cfg,
                      std::optional<Velocity> previous) {
  PairOutcome outcome;
  try {
    outcome.result = match_keypoint_sets(a, b, cfg, previous);
  } catch (const MatchFailure& failure) {
    outcome.failure = failure.diagnostics();
  }
  return outcome;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double position = q * static_cast<double>(values.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(position));
  const auto upper = std::min(lower + 1, values.size() - 1);
  const double fraction = position - static_cast<double>(lower);
  return values[lower] + fraction * (values[upper] - values[lower]);
}

}  // namespace

void PipelineConfig::validate() const {
  require(l_max >= 1, "PipelineConfig: l_max must be >= 1");
  require(alpha == 0 || alpha >= 2, "PipelineConfig: alpha must be >= 2 (or 0 for the sensor default)");
  require(rho >= 0, "PipelineConfig: rho must be >= 1 (or 0 for the sensor default)");
  require(std::isfinite(sigma_c) && sigma_c >= 0.0, "PipelineConfig: sigma_c must be >= 0");
  require(std::isfinite(gate_margin) && gate_margin >= 0.0, "PipelineConfig: gate_margin must be >= 0");
  require(std::isfinite(prior.max_accel) && prior.max_accel > 0.0, "PipelineConfig: max_accel must be positive");
}

DescriptorParams PipelineConfig::descriptor_params(const SensorMeta& meta) const {
  DescriptorParams params = DescriptorParams::for_sensor(meta);
  if (alpha > 0) params.alpha = alpha;
  if (rho > 0) params.rho = rho;
  return params;
}

double PipelineConfig::compatibility_sigma(const SensorMeta& meta) const {
  return sigma_c > 0.0 ? sigma_c : meta.range_resolution;
}

MatchFailure::MatchFailure(const std::string& what, PairDiagnostics diagnostics)
    : Error(ErrorCode::kMatchFailure, what), diagnostics_(std::move(diagnostics)) {}

double acceleration_gate(const PipelineConfig& cfg, std::optional<Velocity> previous, double dt) {
  const double speed = previous ? std::abs(previous->linear) : 0.0;
  return speed * dt + 0.5 * cfg.prior.max_accel * dt * dt + cfg.gate_margin;
}

PairResult match_keypoint_sets(const KeypointSet& a, const KeypointSet& b, const PipelineConfig& cfg,
                               std::optional<Velocity> previous) {
  cfg.validate();
  require(a.source_meta == b.source_meta, "match_keypoint_sets: scans must share sensor meta");
  const SensorMeta& meta = a.source_meta;

  PairResult out;
  PairDiagnostics& diag = out.diagnostics;
  diag.keypoints_a = static_cast<int>(a.size());
  diag.keypoints_b = static_cast<int>(b.size());
  if (a.size() < 2 || b.size() < 2) fail("fewer than 2 keypoints in a scan", diag);

  diag.swapped = a.size() > b.size();
  const KeypointSet& l1 = diag.swapped ? b : a;
  const KeypointSet& l2 = diag.swapped ? a : b;
  if (cfg.prior.kind == MotionPrior::Kind::kMaxAccel) diag.gate_radius = acceleration_gate(cfg, previous, pair_dt(a, b));

  const auto associate_start = Clock::now();
  const DescriptorParams params = cfg.descriptor_params(meta);
  const std::vector<Descriptor> d1 = compute_descriptors(l1, params);
  const std::vector<Descriptor> d2 = compute_descriptors(l2, params);

  UnaryMatches unary;
  try {
    unary = propose_unary_matches(l1, d1, l2, d2, diag.gate_radius);
  } catch (const Error& error) {
    if (error.code() != ErrorCode::kNoCandidates) throw;
    fail("no unary candidates", diag);
  }
  diag.candidates = static_cast<int>(unary.size());
  if (unary.size() < 2) fail("fewer than 2 unary candidates", diag);

  const CompatibilityMatrix compatibility = pairwise_compatibility(unary, l1, l2, cfg.compatibility_sigma(meta));
  SpectralSolution solution;
  try {
    solution = principal_eigenvector(compatibility);
  } catch (const Error& error) {
    if (error.code() != ErrorCode::kNoCompatibilityStructure) throw;
    fail("no mutually compatible candidates", diag);
  }
  diag.eigen_iterations = solution.iterations;
  const MatchSelection selection = greedy_select(compatibility, solution, unary);
  diag.seconds_associate = seconds_since(associate_start);
  diag.matches = static_cast<int>(selection.selected.size());
  diag.mutual_compatibility = selection.mutual_compatibility;
  diag.eigengap = selection.eigengap;
  if (selection.selected.size() < 2) fail("fewer than 2 selected matches", diag);

  const auto motion_start = Clock::now();
  std::vector<PointPair> pairs;
  pairs.reserve(selection.selected.size());
  for (const auto& [first, second] : selection.selected) {
    pairs.push_back({l1.keypoints[static_cast<std::size_t>(first)].point,
                     l2.keypoints[static_cast<std::size_t>(second)].point});
  }
  Pose2 l1_to_l2;
  try {
    l1_to_l2 = estimate_se2(pairs);
  } catch (const Error& error) {
    if (error.code() != ErrorCode::kDegenerateGeometry) throw;
    fail("degenerate match geometry", diag);
  }
  diag.residual_rms = alignment_rms(l1_to_l2, pairs);
  diag.seconds_motion = seconds_since(motion_start);

  // l1_to_l2 maps L1 coordinates to L2 coordinates. With L1 = a this is the
  // inverse of b's pose in a's frame.
  out.pose = diag.swapped ? l1_to_l2 : inverse(l1_to_l2);
  return out;
}

PairResult match_scan_pair(const PolarScan& scan_a, const PolarScan& scan_b, const PipelineConfig& cfg,
                           std::optional<Velocity> previous) {
  cfg.validate();
  require(scan_a.meta() == scan_b.meta(), "match_scan_pair: scans must share sensor meta");
  require(scan_b.timestamp() >= scan_a.timestamp(), "match_scan_pair: scans must be time-ordered");
  const auto start = Clock::now();
  const KeypointSet a = extract_keypoints(scan_a, cfg.l_max);
  const KeypointSet b = extract_keypoints(scan_b, cfg.l_max);
  const double extract_seconds = seconds_since(start);
  try {
    PairResult result = match_keypoint_sets(a, b, cfg, previous);
    result.diagnostics.seconds_extract = extract_seconds;
    return result;
  } catch (const MatchFailure& failure) {
    PairDiagnostics diag = failure.diagnostics();
    diag.seconds_extract = extract_seconds;
    throw MatchFailure(failure.diagnostics().failure_reason, diag);
  }
}

bool OdometryResult::is_consistent(double tolerance) const {
  if (relative_poses.empty()) return trajectory.size() <= 1;
  if (trajectory.size() != relative_poses.size() + 1) return false;
  for (std::size_t k = 0; k < relative_poses.size(); ++k) {
    const Pose2 expected = compose(trajectory[k].pose, relative_poses[k].pose);
    const Pose2& actual = trajectory[k + 1].pose;
    if (std::abs(expected.x - actual.x) > tolerance || std::abs(expected.y - actual.y) > tolerance ||
        std::abs(normalize_angle(expected.theta - actual.theta)) > tolerance) {
      return false;
    }
  }
  return true;
}

std::vector<StampedPose> accumulate(std::span<const RelativePose> relative) {
  std::vector<StampedPose> trajectory;
  if (relative.empty()) return trajectory;
  trajectory.push_back({relative.front().timestamp_a, Pose2::identity()});
  for (const RelativePose& step : relative) {
    trajectory.push_back({step.timestamp_b, compose(trajectory.back().pose, step.pose)});
  }
  return trajectory;
}

OdometryResult run_odometry(std::span<const KeypointSet> sets, const PipelineConfig& cfg, int workers) {
  cfg.validate();
  require(sets.size() >= 2, "run_odometry: at least 2 scans required");
  for (std::size_t k = 1; k < sets.size(); ++k) {
    require(sets[k].source_meta == sets[0].source_meta, "run_odometry: scans must share sensor meta");
    require(sets[k].timestamp > sets[k - 1].timestamp, "run_odometry: timestamps must strictly increase");
  }
  const std::size_t pair_count = sets.size() - 1;
  std::vector<PairOutcome> outcomes(pair_count);

  if (cfg.prior.kind == MotionPrior::Kind::kNone) {
    const auto thread_count = static_cast<std::size_t>(std::clamp<int>(workers, 1, static_cast<int>(pair_count)));
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      for (std::size_t k = next++; k < pair_count; k = next++) {
        outcomes[k] = try_match(sets[k], sets[k + 1], cfg, std::nullopt);
      }
    };
    if (thread_count == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(work);
    }
  } else {
    std::optional<Velocity> velocity;
    for (std::size_t k = 0; k < pair_count; ++k) {
      outcomes[k] = try_match(sets[k], sets[k + 1], cfg, velocity);
      if (outcomes[k].result) velocity = velocity_from(outcomes[k].result->pose, pair_dt(sets[k], sets[k + 1]));
    }
  }

  OdometryResult out;
  out.method = "ro";
  Pose2 previous = Pose2::identity();
  for (std::size_t k = 0; k < pair_count; ++k) {
    RelativePose entry{sets[k].timestamp, sets[k + 1].timestamp, previous, {}};
    if (outcomes[k].result) {
      entry.pose = outcomes[k].result->pose;
      entry.diagnostics = outcomes[k].result->diagnostics;
    } else {
      entry.diagnostics = outcomes[k].failure;
      entry.diagnostics.failed = true;
      entry.diagnostics.fallback = true;
    }
    previous = entry.pose;
    out.relative_poses.push_back(std::move(entry));
  }
  out.trajectory = accumulate(out.relative_poses);
  return out;
}

OdometryResult run_odometry(std::span<const PolarScan> scans, const PipelineConfig& cfg, int workers) {
  cfg.validate();
  require(scans.size() >= 2, "run_odometry: at least 2 scans required");
  std::vector<KeypointSet> sets;
  std::vector<double> extract_seconds;
  sets.reserve(scans.size());
  for (const PolarScan& scan : scans) {
    const auto start = Clock::now();
    sets.push_back(extract_keypoints(scan, cfg.l_max));
    extract_seconds.push_back(seconds_since(start));
  }
  OdometryResult out = run_odometry(std::span<const KeypointSet>(sets), cfg, workers);
  for (std::size_t k = 0; k < out.relative_poses.size(); ++k) {
    out.relative_poses[k].diagnostics.seconds_extract = extract_seconds[k + 1] + (k == 0 ? extract_seconds[0] : 0.0);
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  return percentile(std::move(values), 0.5);
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double sum = 0.0;
  for (const double v : values) sum += (v - mean) * (v - mean);
  return std::sqrt(sum / static_cast<double>(values.size() - 1));
}

EvaluationMetrics evaluate(const OdometryResult& result, const TrajectorySpec& truth) {
  truth.validate();
  if (truth.poses.size() != result.relative_poses.size() + 1) {
    throw_error(ErrorCode::kTimestampMismatch, "truth has " + std::to_string(truth.poses.size()) +
                                                   " poses but the estimate has " +
                                                   std::to_string(result.relative_poses.size()) + " pairs");
  }
  constexpr double kTimestampTolerance = 1e-6;
  const std::vector<Pose2> true_motion = relative_motions(truth);

  EvaluationMetrics metrics;
  metrics.pairs = static_cast<int>(result.relative_poses.size());
  std::vector<double> times;
  double sum_mutual = 0.0;
  double sum_gap = 0.0;
  for (std::size_t k = 0; k < result.relative_poses.size(); ++k) {
    const RelativePose& entry = result.relative_poses[k];
    if (std::abs(entry.timestamp_a - truth.poses[k].timestamp) > kTimestampTolerance ||
        std::abs(entry.timestamp_b - truth.poses[k + 1].timestamp) > kTimestampTolerance) {
      throw_error(ErrorCode::kTimestampMismatch, "pair " + std::to_string(k) + " does not align with the truth");
    }
    times.push_back(entry.diagnostics.seconds_total());
    if (entry.diagnostics.failed) {
      ++metrics.failures;
      continue;
    }
    const Pose2& truth_k = true_motion[k];
    metrics.translation_errors.push_back(std::hypot(entry.pose.x - truth_k.x, entry.pose.y - truth_k.y));
    metrics.rotation_errors.push_back(std::abs(normalize_angle(entry.pose.theta - truth_k.theta)));
    sum_mutual += entry.diagnostics.mutual_compatibility;
    sum_gap += entry.diagnostics.eigengap;
  }
  const auto ok = static_cast<double>(metrics.translation_errors.size());
  metrics.translation_median = median(metrics.translation_errors);
  metrics.translation_std = sample_std(metrics.translation_errors);
  metrics.rotation_median = median(metrics.rotation_errors);
  metrics.rotation_std = sample_std(metrics.rotation_errors);
  metrics.mean_mutual_compatibility = ok > 0 ? sum_mutual / ok : 0.0;
  metrics.mean_eigengap = ok > 0 ? sum_gap / ok : 0.0;
  metrics.time_p50 = percentile(times, 0.5);
  metrics.time_p90 = percentile(times, 0.9);
  metrics.time_max = times.empty() ? 0.0 : *std::max_element(times.begin(), times.end());
  return metrics;
}

}  // namespace radar_odom
