#include "radar_odom/keypoints.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "radar_odom/error.hpp"

namespace radar_odom {
namespace {

int wrap(int index, int size) { return (index % size + size) % size; }

}  // namespace

Grid gradient_magnitude(const PolarScan& scan) {
  const Grid& s = scan.power();
  const int m = static_cast<int>(s.rows());
  const int n = static_cast<int>(s.cols());
  Grid magnitude(m, n);

  for (int a = 0; a < m; ++a) {
    const int prev_a = wrap(a - 1, m);
    const int next_a = wrap(a + 1, m);
    for (int r = 0; r < n; ++r) {
      const int prev_r = std::max(r - 1, 0);
      const int next_r = std::min(r + 1, n - 1);
      double along_range = 0.0;
      for (const int row : {prev_a, a, next_a}) along_range += s(row, next_r) - s(row, prev_r);
      double along_azimuth = 0.0;
      for (const int col : {prev_r, r, next_r}) along_azimuth += s(next_a, col) - s(prev_a, col);
      magnitude(a, r) = std::hypot(along_range, along_azimuth);
    }
  }

  const double peak = magnitude.maxCoeff();
  if (peak > 0.0) {
    magnitude /= peak;
  } else {
    magnitude.setZero();
  }
  return magnitude;
}

KeypointExtraction extract_keypoints_detailed(const PolarScan& scan, int l_max) {
  require(l_max >= 1, "extract_keypoints: l_max must be >= 1");
  const SensorMeta& meta = scan.meta();
  const int m = meta.num_azimuths;
  const int n = meta.num_range_bins;

  KeypointExtraction out;
  out.gradient = gradient_magnitude(scan);
  const Grid centered = scan.power() - scan.power().mean();
  out.rescaled = (1.0 - out.gradient) * centered;
  const Grid& h = out.rescaled;

  const std::size_t cells = meta.cell_count();
  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const double* h_flat = h.data();
  std::sort(order.begin(), order.end(), [h_flat](std::size_t lhs, std::size_t rhs) {
    if (h_flat[lhs] != h_flat[rhs]) return h_flat[lhs] > h_flat[rhs];
    return lhs < rhs;
  });

  out.marked = MarkGrid::Constant(m, n, false);
  MarkGrid& marked = out.marked;
  std::size_t marked_count = 0;
  int regions = 0;
  for (std::size_t cursor = 0; regions < l_max && marked_count < cells && cursor < cells; ++cursor) {
    const std::size_t flat = order[cursor];
    if (h_flat[flat] <= 0.0) break;
    const int a = static_cast<int>(flat / static_cast<std::size_t>(n));
    const int r = static_cast<int>(flat % static_cast<std::size_t>(n));
    if (marked(a, r)) continue;

    int low = r - 1;
    while (low >= 0 && !(centered(a, low) < 0.0)) --low;
    low = std::max(low, 0);
    int high = r + 1;
    while (high < n && !(centered(a, high) < 0.0)) ++high;
    high = std::min(high, n - 1);

    bool touches_marked = false;
    for (int q = low; q <= high; ++q) touches_marked = touches_marked || marked(a, q);
    if (!touches_marked) ++regions;
    for (int q = low; q <= high; ++q) {
      if (!marked(a, q)) {
        marked(a, q) = true;
        ++marked_count;
      }
    }
  }
  out.region_count = regions;

  KeypointSet& set = out.keypoints;
  set.source_meta = meta;
  set.timestamp = scan.timestamp();
  for (int a = 0; a < m; ++a) {
    const int prev_a = wrap(a - 1, m);
    const int next_a = wrap(a + 1, m);
    int r = 0;
    while (r < n) {
      if (!marked(a, r)) {
        ++r;
        continue;
      }
      const int run_start = r;
      while (r < n && marked(a, r)) ++r;
      const int run_end = r;  // exclusive

      bool has_neighbour = false;
      int best = run_start;
      for (int q = run_start; q < run_end; ++q) {
        has_neighbour = has_neighbour || marked(prev_a, q) || marked(next_a, q);
        if (h(a, q) > h(a, best)) best = q;
      }
      if (has_neighbour && h(a, best) > 0.0) {
        set.keypoints.push_back({a, best, bin_to_point(a, best, meta), h(a, best)});
      }
    }
  }
  return out;
}

KeypointSet extract_keypoints(const PolarScan& scan, int l_max) {
  return std::move(extract_keypoints_detailed(scan, l_max).keypoints);
}

}  // namespace radar_odom
