#include "radar_odom/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "radar_odom/descriptor.hpp"
#include "radar_odom/error.hpp"
#include "radar_odom/graph_match.hpp"
#include "radar_odom/keypoints.hpp"
#include "radar_odom/motion.hpp"
#include "radar_odom/simulator.hpp"

namespace radar_odom {
namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
double best_of(int repeats, Fn&& fn) {
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < repeats; ++r) {
    const auto start = Clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(Clock::now() - start).count());
  }
  return best;
}

// Dense, cluttered scene: enough landmarks and spurious blobs that the
// region cap, not the scene, limits the keypoint count.
std::vector<Landmark> bench_world(std::uint64_t seed) {
  LandmarkField field;
  field.min_radius = 4.0;
  field.max_radius = 95.0;
  field.min_separation = 2.0;
  return scatter_landmarks(800, field, seed);
}

ArtifactModel bench_artifacts() {
  ArtifactModel artifacts;
  artifacts.speckle_scale = 0.3;
  artifacts.false_positive_rate = 80.0;
  artifacts.beam_width_azimuths = 1.2;
  return artifacts;
}

}  // namespace

void BenchConfig::validate() const {
  if (l_max_sweep.size() < 3) throw_error(ErrorCode::kConfig, "bench needs at least 3 l_max sweep points");
  if (grid_sweep.size() < 3) throw_error(ErrorCode::kConfig, "bench needs at least 3 grid sweep points");
  for (const int l : l_max_sweep) {
    if (l < 1) throw_error(ErrorCode::kConfig, "bench l_max values must be >= 1");
  }
  for (const auto& [m, n] : grid_sweep) {
    if (m < 2 || n < 2) throw_error(ErrorCode::kConfig, "bench grid sizes must be at least 2 x 2");
  }
  if (repeats < 1) throw_error(ErrorCode::kConfig, "bench repeats must be >= 1");
  if (extraction_l_max < 1) throw_error(ErrorCode::kConfig, "bench extraction l_max must be >= 1");
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "log_log_slope: need matching samples, at least 2");
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "log_log_slope: samples must be positive");
    mean_x += std::log(x[i]);
    mean_y += std::log(y[i]);
  }
  mean_x /= static_cast<double>(x.size());
  mean_y /= static_cast<double>(y.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mean_x;
    sxy += dx * (std::log(y[i]) - mean_y);
    sxx += dx * dx;
  }
  require(sxx > 0.0, "log_log_slope: x values must not all be equal");
  return sxy / sxx;
}

BenchReport run_complexity_bench(const BenchConfig& cfg) {
  cfg.validate();
  BenchReport report;
  const std::vector<Landmark> world = bench_world(cfg.seed);
  const ArtifactModel artifacts = bench_artifacts();

  const SensorMeta meta{100, 200, 0.5, 0.25};
  const Pose2 second_pose(0.8, 0.2, 0.02);
  const PolarScan scan_a = render_scan(world, Pose2::identity(), meta, artifacts, cfg.seed, 0.0);
  const PolarScan scan_b = render_scan(world, second_pose, meta, artifacts, cfg.seed + 1, meta.scan_period);
  const DescriptorParams params = DescriptorParams::for_sensor(meta);

  for (const int l_max : cfg.l_max_sweep) {
    AssociationTiming row;
    row.l_max = l_max;
    KeypointSet a;
    KeypointSet b;
    row.seconds_extract = best_of(cfg.repeats, [&] {
      a = extract_keypoints(scan_a, l_max);
      b = extract_keypoints(scan_b, l_max);
    });
    row.keypoints_a = static_cast<int>(a.size());
    row.keypoints_b = static_cast<int>(b.size());
    const KeypointSet& l1 = a.size() <= b.size() ? a : b;
    const KeypointSet& l2 = a.size() <= b.size() ? b : a;

    std::vector<PointPair> pairs;
    row.seconds_associate = best_of(cfg.repeats, [&] {
      pairs.clear();
      row.candidates = 0;
      row.matches = 0;
      if (l1.empty()) return;
      const auto d1 = compute_descriptors(l1, params);
      const auto d2 = compute_descriptors(l2, params);
      // A sweep point without usable structure still counts toward the timing.
      try {
        const UnaryMatches unary = propose_unary_matches(l1, d1, l2, d2);
        row.candidates = static_cast<int>(unary.size());
        const CompatibilityMatrix c = pairwise_compatibility(unary, l1, l2, meta.range_resolution);
        const MatchSelection selection = greedy_select(c, principal_eigenvector(c), unary);
        row.matches = static_cast<int>(selection.selected.size());
        for (const auto& [first, second] : selection.selected) {
          pairs.push_back({l1.keypoints[static_cast<std::size_t>(first)].point,
                           l2.keypoints[static_cast<std::size_t>(second)].point});
        }
      } catch (const Error&) {
      }
    });
    row.seconds_motion = best_of(cfg.repeats, [&] {
      if (pairs.size() >= 2) (void)estimate_se2(pairs);
    });
    report.association.push_back(row);
  }

  for (const auto& [m, n] : cfg.grid_sweep) {
    const SensorMeta grid_meta{m, n, meta.max_range() / n, meta.scan_period};
    const PolarScan scan = render_scan(world, Pose2::identity(), grid_meta, artifacts, cfg.seed, 0.0);
    ExtractionTiming row;
    row.azimuths = m;
    row.range_bins = n;
    KeypointSet keypoints;
    row.seconds = best_of(cfg.repeats, [&] { keypoints = extract_keypoints(scan, cfg.extraction_l_max); });
    row.keypoints = static_cast<int>(keypoints.size());
    report.extraction.push_back(row);
  }

  std::vector<double> x;
  std::vector<double> y;
  for (const auto& row : report.association) {
    x.push_back(row.l_max);
    y.push_back(std::max(row.seconds_associate, 1e-9));
  }
  report.association_slope = log_log_slope(x, y);
  x.clear();
  y.clear();
  for (const auto& row : report.extraction) {
    x.push_back(static_cast<double>(row.azimuths) * row.range_bins);
    y.push_back(std::max(row.seconds, 1e-9));
  }
  report.extraction_slope = log_log_slope(x, y);
  return report;
}

}  // namespace radar_odom
