#include "radar_odom/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "radar_odom/error.hpp"

namespace radar_odom {
namespace {

enum class Stream : std::uint32_t { kLandmarks = 1, kFalsePositives = 2, kSpeckle = 3, kBackground = 4, kMotion = 5 };

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

// Truncation radius of a rendered blob, in standard deviations.
constexpr double kBlobSupport = 4.0;

void add_blob(Grid& power, double azimuth_index, double range_index, double peak, const ArtifactModel& artifacts) {
  const int m = static_cast<int>(power.rows());
  const int n = static_cast<int>(power.cols());
  const double sigma_a = artifacts.beam_width_azimuths;
  const double sigma_r = artifacts.range_spread_bins;
  const int half_a = std::min(static_cast<int>(std::ceil(kBlobSupport * sigma_a)), (m - 1) / 2);
  const int half_r = static_cast<int>(std::ceil(kBlobSupport * sigma_r));
  const int center_a = static_cast<int>(std::lround(azimuth_index));
  const int center_r = static_cast<int>(std::lround(range_index));

  for (int da = -half_a; da <= half_a; ++da) {
    const int a = ((center_a + da) % m + m) % m;
    double diff_a = static_cast<double>(a) - azimuth_index;
    diff_a -= static_cast<double>(m) * std::round(diff_a / static_cast<double>(m));
    const double weight_a = std::exp(-0.5 * diff_a * diff_a / (sigma_a * sigma_a));
    for (int r = std::max(0, center_r - half_r); r <= std::min(n - 1, center_r + half_r); ++r) {
      const double diff_r = static_cast<double>(r) - range_index;
      power(a, r) += peak * weight_a * std::exp(-0.5 * diff_r * diff_r / (sigma_r * sigma_r));
    }
  }
}

void check_unit_interval(double v, const char* what) { require(std::isfinite(v) && v >= 0.0 && v <= 1.0, what); }
void check_non_negative(double v, const char* what) { require(std::isfinite(v) && v >= 0.0, what); }
void check_positive(double v, const char* what) { require(std::isfinite(v) && v > 0.0, what); }

Pose2 constant_twist_step(double speed, double yaw_rate, double dt) {
  const double turn = yaw_rate * dt;
  if (std::abs(turn) < 1e-12) return {speed * dt, 0.0, 0.0};
  const double radius = speed / yaw_rate;
  return {radius * std::sin(turn), radius * (1.0 - std::cos(turn)), turn};
}

}  // namespace

void ArtifactModel::validate() const {
  check_non_negative(speckle_scale, "ArtifactModel: speckle_scale must be >= 0");
  check_non_negative(background_noise, "ArtifactModel: background_noise must be >= 0");
  check_non_negative(false_positive_rate, "ArtifactModel: false_positive_rate must be >= 0");
  check_positive(false_positive_reflectivity, "ArtifactModel: false_positive_reflectivity must be > 0");
  check_unit_interval(dropout_prob, "ArtifactModel: dropout_prob must lie in [0, 1]");
  check_positive(beam_width_azimuths, "ArtifactModel: beam_width_azimuths must be > 0");
  check_positive(range_spread_bins, "ArtifactModel: range_spread_bins must be > 0");
}

void TrajectorySpec::validate() const {
  require(!poses.empty(), "TrajectorySpec: at least one pose required");
  for (std::size_t k = 1; k < poses.size(); ++k) {
    require(poses[k].timestamp > poses[k - 1].timestamp, "TrajectorySpec: timestamps must strictly increase");
  }
}

TrajectoryKind parse_trajectory_kind(std::string_view name) {
  if (name == "straight") return TrajectoryKind::kStraight;
  if (name == "arc") return TrajectoryKind::kArc;
  if (name == "random-walk" || name == "random_walk") return TrajectoryKind::kRandomWalk;
  throw_error(ErrorCode::kConfig, "unknown trajectory kind '" + std::string(name) + "'");
}

std::string_view to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::kStraight: return "straight";
    case TrajectoryKind::kArc: return "arc";
    case TrajectoryKind::kRandomWalk: return "random-walk";
  }
  return "straight";
}

PolarScan render_scan(std::span<const Landmark> world, const Pose2& pose, const SensorMeta& meta,
                      const ArtifactModel& artifacts, std::uint64_t seed, double timestamp) {
  meta.validate();
  artifacts.validate();
  const int m = meta.num_azimuths;
  const int n = meta.num_range_bins;
  Grid power = Grid::Zero(m, n);

  const Pose2 world_to_sensor = inverse(pose);
  std::mt19937_64 landmark_rng = make_rng(seed, Stream::kLandmarks);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const Landmark& landmark : world) {
    require(landmark.reflectivity > 0.0, "render_scan: landmark reflectivity must be positive");
    // One draw per landmark whether visible or not keeps the stream aligned.
    const bool dropped = unit(landmark_rng) < artifacts.dropout_prob;
    const CartesianPoint local = world_to_sensor.apply(landmark.position);
    const double range = point_range(local);
    if (dropped || range >= meta.max_range()) continue;
    double bearing = std::atan2(local.y, local.x);
    if (bearing < 0.0) bearing += 2.0 * std::numbers::pi;
    const double azimuth_index = bearing * m / (2.0 * std::numbers::pi);
    const double range_index = range / meta.range_resolution - 0.5;
    add_blob(power, azimuth_index, range_index, landmark.reflectivity, artifacts);
  }

  if (artifacts.false_positive_rate > 0.0) {
    std::mt19937_64 fp_rng = make_rng(seed, Stream::kFalsePositives);
    std::poisson_distribution<int> count(artifacts.false_positive_rate);
    std::uniform_real_distribution<double> azimuth(0.0, static_cast<double>(m));
    std::uniform_real_distribution<double> range(0.0, static_cast<double>(n - 1));
    const int blobs = count(fp_rng);
    for (int k = 0; k < blobs; ++k) {
      const double a = azimuth(fp_rng);
      const double r = range(fp_rng);
      add_blob(power, a, r, artifacts.false_positive_reflectivity, artifacts);
    }
  }

  if (artifacts.speckle_scale > 0.0) {
    std::mt19937_64 speckle_rng = make_rng(seed, Stream::kSpeckle);
    const double variance = artifacts.speckle_scale * artifacts.speckle_scale;
    std::gamma_distribution<double> speckle(1.0 / variance, variance);
    for (Eigen::Index i = 0; i < power.size(); ++i) power.data()[i] *= speckle(speckle_rng);
  }

  if (artifacts.background_noise > 0.0) {
    std::mt19937_64 background_rng = make_rng(seed, Stream::kBackground);
    std::exponential_distribution<double> floor(1.0 / artifacts.background_noise);
    for (Eigen::Index i = 0; i < power.size(); ++i) power.data()[i] += floor(background_rng);
  }

  return PolarScan(meta, std::move(power), timestamp);
}

std::vector<PolarScan> render_sequence(std::span<const Landmark> world, const TrajectorySpec& trajectory,
                                       const SensorMeta& meta, const ArtifactModel& artifacts, std::uint64_t seed) {
  trajectory.validate();
  std::vector<PolarScan> scans;
  scans.reserve(trajectory.poses.size());
  for (std::size_t k = 0; k < trajectory.poses.size(); ++k) {
    const StampedPose& p = trajectory.poses[k];
    scans.push_back(render_scan(world, p.pose, meta, artifacts, seed * 1000 + k, p.timestamp));
  }
  return scans;
}

TrajectorySpec make_trajectory(TrajectoryKind kind, int steps, double speed, double yaw_rate, double dt,
                               std::uint64_t seed) {
  require(steps >= 1, "make_trajectory: steps must be >= 1");
  require(std::isfinite(dt) && dt > 0.0, "make_trajectory: dt must be positive");
  require(std::isfinite(speed) && std::isfinite(yaw_rate), "make_trajectory: speed and yaw_rate must be finite");

  TrajectorySpec trajectory;
  trajectory.poses.reserve(static_cast<std::size_t>(steps));
  trajectory.poses.push_back({0.0, Pose2::identity()});

  std::mt19937_64 rng = make_rng(seed, Stream::kMotion);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  constexpr double kMaxLinearAccel = 1.0;   // m/s^2
  constexpr double kMaxAngularAccel = 0.5;  // rad/s^2
  const double max_speed = 2.0 * std::abs(speed);
  const double max_yaw_rate = std::max(std::abs(yaw_rate), 0.5);

  double v = speed;
  double w = kind == TrajectoryKind::kStraight ? 0.0 : yaw_rate;
  Pose2 current = Pose2::identity();
  for (int k = 1; k < steps; ++k) {
    if (kind == TrajectoryKind::kRandomWalk) {
      v = std::clamp(v + jitter(rng) * kMaxLinearAccel * dt, 0.0, max_speed);
      w = std::clamp(w + jitter(rng) * kMaxAngularAccel * dt, -max_yaw_rate, max_yaw_rate);
    }
    current = compose(current, constant_twist_step(v, w, dt));
    trajectory.poses.push_back({static_cast<double>(k) * dt, current});
  }
  return trajectory;
}

TrajectorySpec append_trajectory(const TrajectorySpec& head, const TrajectorySpec& tail) {
  head.validate();
  tail.validate();
  TrajectorySpec joined = head;
  const StampedPose& last = head.poses.back();
  const StampedPose& tail_start = tail.poses.front();
  const Pose2 tail_origin_inverse = inverse(tail_start.pose);
  for (std::size_t k = 1; k < tail.poses.size(); ++k) {
    const Pose2 offset = compose(tail_origin_inverse, tail.poses[k].pose);
    joined.poses.push_back({last.timestamp + (tail.poses[k].timestamp - tail_start.timestamp),
                            compose(last.pose, offset)});
  }
  return joined;
}

std::vector<Pose2> relative_motions(const TrajectorySpec& trajectory) {
  std::vector<Pose2> motions;
  for (std::size_t k = 1; k < trajectory.poses.size(); ++k) {
    motions.push_back(compose(inverse(trajectory.poses[k - 1].pose), trajectory.poses[k].pose));
  }
  return motions;
}

std::vector<Landmark> scatter_landmarks(int count, const LandmarkField& field, std::uint64_t seed) {
  require(count >= 0, "scatter_landmarks: count must be >= 0");
  require(field.min_radius >= 0.0 && field.max_radius > field.min_radius, "scatter_landmarks: bad radii");
  require(field.min_reflectivity > 0.0 && field.max_reflectivity >= field.min_reflectivity,
          "scatter_landmarks: bad reflectivity range");

  std::mt19937_64 rng = make_rng(seed, Stream::kLandmarks);
  std::uniform_real_distribution<double> radius_sq(field.min_radius * field.min_radius,
                                                   field.max_radius * field.max_radius);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> reflectivity(field.min_reflectivity, field.max_reflectivity);

  std::vector<Landmark> landmarks;
  const long max_attempts = 1000L * std::max(count, 1);
  for (long attempt = 0; attempt < max_attempts && static_cast<int>(landmarks.size()) < count; ++attempt) {
    const double r = std::sqrt(radius_sq(rng));
    const double phi = angle(rng);
    const CartesianPoint candidate{field.center.x + r * std::cos(phi), field.center.y + r * std::sin(phi)};
    const double refl = reflectivity(rng);
    const bool crowded = std::any_of(landmarks.begin(), landmarks.end(), [&](const Landmark& other) {
      return std::hypot(other.position.x - candidate.x, other.position.y - candidate.y) < field.min_separation;
    });
    if (!crowded) landmarks.push_back({candidate, refl});
  }
  require(static_cast<int>(landmarks.size()) == count, "scatter_landmarks: field too small for the separation");
  return landmarks;
}

}  // namespace radar_odom
