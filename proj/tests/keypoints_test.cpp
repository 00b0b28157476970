#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "radar_odom/error.hpp"
#include "radar_odom/keypoints.hpp"
#include "radar_odom/simulator.hpp"
#include "keypoint_fixtures.hpp"
#include "support.hpp"

namespace radar_odom {
namespace {

using testing::Gen;
using namespace fixtures;

TEST(KeypointFixtures, MatchHandTracedOutputs) {
  for (const FixtureCase& c : kFixtureCases) {
    const KeypointExtraction out = extract_keypoints_detailed(c.scan(), c.l_max);
    EXPECT_EQ(out.region_count, c.regions) << c.name << " l_max=" << c.l_max;
    EXPECT_EQ(cells_of(out.keypoints), c.expected) << c.name << " l_max=" << c.l_max;
  }
}

TEST(KeypointFixtures, BlobKeypointsCarryGeometryAndStrength) {
  const KeypointExtraction out = extract_keypoints_detailed(blob(), 100);
  ASSERT_EQ(out.keypoints.size(), 3u);
  for (const Keypoint& k : out.keypoints.keypoints) {
    EXPECT_EQ(k.point, bin_to_point(k.azimuth_index, k.range_bin, kFixtureMeta));
    EXPECT_EQ(k.strength, out.rescaled(k.azimuth_index, k.range_bin));
    EXPECT_GT(k.strength, 0.0);
  }
  // The blob's marked interval runs from the first negative bin below to the first above.
  for (int r = 0; r < 20; ++r) EXPECT_EQ(out.marked(2, r), r >= 8 && r <= 12) << r;
}

TEST(GradientMagnitude, ConstantScanIsZero) {
  Grid power = Grid::Constant(6, 9, 2.5);
  const Grid g = gradient_magnitude(PolarScan(SensorMeta{6, 9, 1.0, 0.25}, power, 0.0));
  EXPECT_EQ(g.maxCoeff(), 0.0);
  EXPECT_EQ(g.minCoeff(), 0.0);
}

TEST(GradientMagnitude, RangeStepPeaksAtEdge) {
  Grid power = Grid::Zero(6, 10);
  power.rightCols(5) = 1.0;
  const Grid g = gradient_magnitude(PolarScan(SensorMeta{6, 10, 1.0, 0.25}, power, 0.0));
  for (int a = 0; a < 6; ++a) {
    // Both columns straddling the step see the full central difference.
    EXPECT_DOUBLE_EQ(g(a, 4), 1.0);
    EXPECT_DOUBLE_EQ(g(a, 5), 1.0);
    EXPECT_EQ(g(a, 2), 0.0);
    EXPECT_EQ(g(a, 0), 0.0);
    EXPECT_EQ(g(a, 9), 0.0);
  }
}

TEST(GradientMagnitude, WrapsInAzimuth) {
  Grid power = Grid::Zero(6, 8);
  power.row(0) = 3.0;
  const Grid g = gradient_magnitude(PolarScan(SensorMeta{6, 8, 1.0, 0.25}, power, 0.0));
  // Row 5 neighbours row 0 through the wrap, exactly like row 1.
  for (int r = 0; r < 8; ++r) {
    EXPECT_DOUBLE_EQ(g(5, r), g(1, r));
    EXPECT_GT(g(5, r), 0.0);
    EXPECT_EQ(g(3, r), 0.0);
  }
}

TEST(GradientMagnitude, RangeWithinUnitInterval) {
  Gen gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const SensorMeta meta{gen.integer(3, 30), gen.integer(2, 40), 1.0, 0.25};
    Grid power(meta.num_azimuths, meta.num_range_bins);
    for (Eigen::Index i = 0; i < power.size(); ++i) power.data()[i] = gen.uniform(0.0, 5.0);
    const Grid g = gradient_magnitude(PolarScan(meta, power, 0.0));
    EXPECT_GE(g.minCoeff(), 0.0);
    EXPECT_DOUBLE_EQ(g.maxCoeff(), 1.0);
  }
}

TEST(ExtractKeypoints, ZeroScanIsEmpty) {
  const KeypointExtraction out = extract_keypoints_detailed(PolarScan::zeros(SensorMeta{}), 50);
  EXPECT_TRUE(out.keypoints.empty());
  EXPECT_EQ(out.region_count, 0);
}

TEST(ExtractKeypoints, RejectsNonPositiveLimit) {
  EXPECT_THROW(extract_keypoints(blob(), 0), Error);
}

TEST(ExtractKeypoints, KeepsScanMetaAndTimestamp) {
  const PolarScan scan(kFixtureMeta, blob().power(), 12.5);
  const KeypointSet set = extract_keypoints(scan, 10);
  EXPECT_EQ(set.source_meta, kFixtureMeta);
  EXPECT_EQ(set.timestamp, 12.5);
}

// Random scene generator for the extraction properties.
PolarScan random_scene(Gen& gen, int m, int n) {
  const SensorMeta meta{m, n, 0.5, 0.25};
  std::vector<Landmark> world;
  const int count = gen.integer(0, 25);
  for (const CartesianPoint& p : gen.points(count, meta.max_range() * 0.95)) world.push_back({p, gen.uniform(0.3, 2.0)});
  ArtifactModel artifacts;
  artifacts.speckle_scale = gen.uniform(0.0, 0.5);
  artifacts.background_noise = gen.uniform(0.0, 0.1);
  artifacts.false_positive_rate = gen.uniform(0.0, 10.0);
  artifacts.beam_width_azimuths = gen.uniform(0.3, 1.5);
  artifacts.range_spread_bins = gen.uniform(0.3, 1.5);
  return render_scan(world, Pose2(0, 0, gen.angle()), meta, artifacts, gen.integer(0, 1 << 30));
}

TEST(ExtractKeypointsProperty, RegionAndKeypointCountsBoundedByLimit) {
  Gen gen(21);
  for (int trial = 0; trial < 60; ++trial) {
    const PolarScan scan = random_scene(gen, gen.integer(8, 60), gen.integer(8, 80));
    const int l_max = gen.integer(1, 120);
    const KeypointExtraction out = extract_keypoints_detailed(scan, l_max);
    EXPECT_LE(out.region_count, l_max);
    EXPECT_LE(static_cast<int>(out.keypoints.size()), l_max);
  }
}

TEST(ExtractKeypointsProperty, KeypointsAreRunMaximaWithPositiveStrength) {
  Gen gen(22);
  for (int trial = 0; trial < 40; ++trial) {
    const PolarScan scan = random_scene(gen, gen.integer(8, 60), gen.integer(8, 80));
    const KeypointExtraction out = extract_keypoints_detailed(scan, gen.integer(1, 200));
    std::set<std::pair<int, int>> seen;
    for (const Keypoint& k : out.keypoints.keypoints) {
      EXPECT_TRUE(seen.insert({k.azimuth_index, k.range_bin}).second);
      EXPECT_GT(k.strength, 0.0);
      ASSERT_TRUE(out.marked(k.azimuth_index, k.range_bin));
      for (int r = k.range_bin; r >= 0 && out.marked(k.azimuth_index, r); --r) {
        EXPECT_LE(out.rescaled(k.azimuth_index, r), k.strength);
      }
      for (int r = k.range_bin; r < scan.meta().num_range_bins && out.marked(k.azimuth_index, r); ++r) {
        EXPECT_LE(out.rescaled(k.azimuth_index, r), k.strength);
      }
    }
  }
}

TEST(ExtractKeypointsProperty, ConstantOffsetLeavesKeypointsUnchanged) {
  Gen gen(23);
  for (int trial = 0; trial < 30; ++trial) {
    const PolarScan scan = random_scene(gen, gen.integer(8, 50), gen.integer(8, 60));
    const int l_max = gen.integer(1, 150);
    const double offset = gen.uniform(0.1, 10.0);
    const PolarScan shifted(scan.meta(), scan.power() + offset, scan.timestamp());
    const KeypointSet base = extract_keypoints(scan, l_max);
    const KeypointSet moved = extract_keypoints(shifted, l_max);
    EXPECT_EQ(cells_of(base), cells_of(moved)) << "trial " << trial;
    for (std::size_t i = 0; i < std::min(base.size(), moved.size()); ++i) {
      EXPECT_NEAR(base.keypoints[i].strength, moved.keypoints[i].strength, 1e-9);
    }
  }
}

TEST(ExtractKeypointsProperty, IsolatedSingleAzimuthBlobsNeverYieldKeypoints) {
  Gen gen(24);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = gen.integer(3, 40);
    const int n = gen.integer(5, 60);
    Grid power = Grid::Zero(m, n);
    // Blobs confined to every other azimuth cannot touch a neighbour.
    const int blobs = gen.integer(1, 8);
    for (int b = 0; b < blobs; ++b) {
      // Even azimuths up to m - 2, so the wrap never pairs m - 1 with 0.
      const int a = 2 * gen.integer(0, (m - 2) / 2);
      const int center = gen.integer(0, n - 1);
      const int half = gen.integer(0, 3);
      for (int r = std::max(0, center - half); r <= std::min(n - 1, center + half); ++r) {
        power(a, r) += gen.uniform(0.5, 5.0);
      }
    }
    const PolarScan scan(SensorMeta{m, n, 1.0, 0.25}, power, 0.0);
    EXPECT_TRUE(extract_keypoints(scan, gen.integer(1, 500)).empty()) << "trial " << trial;
  }
}

TEST(ExtractKeypointsProperty, RaisingTheLimitOnlyExtendsMarking) {
  Gen gen(25);
  for (int trial = 0; trial < 30; ++trial) {
    const PolarScan scan = random_scene(gen, gen.integer(8, 40), gen.integer(8, 60));
    const int k = gen.integer(1, 80);
    const KeypointExtraction small = extract_keypoints_detailed(scan, k);
    const KeypointExtraction large = extract_keypoints_detailed(scan, k + 1);
    EXPECT_TRUE((large.marked || !small.marked).all());
    EXPECT_GE(large.region_count, small.region_count);
    for (const Keypoint& kp : small.keypoints.keypoints) EXPECT_TRUE(large.marked(kp.azimuth_index, kp.range_bin));
  }
}

TEST(ExtractKeypointsProperty, AzimuthRollCommutesWithExtraction) {
  Gen gen(26);
  for (int trial = 0; trial < 20; ++trial) {
    const PolarScan scan = random_scene(gen, gen.integer(8, 40), gen.integer(8, 50));
    const int m = scan.meta().num_azimuths;
    const int shift = gen.integer(1, m - 1);
    Grid rolled(scan.power().rows(), scan.power().cols());
    for (int a = 0; a < m; ++a) rolled.row((a + shift) % m) = scan.power().row(a);
    const int l_max = gen.integer(1, 100);
    const KeypointExtraction base = extract_keypoints_detailed(scan, l_max);
    const KeypointExtraction moved = extract_keypoints_detailed(PolarScan(scan.meta(), rolled, 0.0), l_max);
    // Tie order depends on azimuth index, so compare only when no H ties exist.
    std::vector<double> values(base.rescaled.data(), base.rescaled.data() + base.rescaled.size());
    std::sort(values.begin(), values.end());
    if (std::adjacent_find(values.begin(), values.end(), [](double x, double y) { return x == y && x > 0; }) !=
        values.end()) {
      continue;
    }
    Cells expected;
    for (const auto& [a, r] : cells_of(base.keypoints)) expected.emplace_back((a + shift) % m, r);
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(cells_of(moved.keypoints), expected) << "trial " << trial;
  }
}

TEST(ExtractKeypoints, GaussianBlobOverThreeAzimuthsGivesOneToThreeKeypoints) {
  const SensorMeta meta{5, 20, 1.0, 0.25};
  Grid power = Grid::Zero(5, 20);
  for (int a = 1; a <= 3; ++a) {
    for (int r = 0; r < 20; ++r) {
      const double da = a - 2.0;
      const double dr = r - 10.3;
      power(a, r) = std::exp(-0.5 * (da * da / 0.49 + dr * dr / 1.2));
    }
  }
  const KeypointSet set = extract_keypoints(PolarScan(meta, power, 0.0), 1000);
  ASSERT_GE(set.size(), 1u);
  ASSERT_LE(set.size(), 3u);
  std::set<int> azimuths;
  for (const Keypoint& k : set.keypoints) {
    EXPECT_TRUE(azimuths.insert(k.azimuth_index).second);
    EXPECT_GE(k.azimuth_index, 1);
    EXPECT_LE(k.azimuth_index, 3);
    EXPECT_LE(std::abs(k.range_bin - 10), 1);
  }
}

}  // namespace
}  // namespace radar_odom
