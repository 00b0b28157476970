#include "radar_odom/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "radar_odom/error.hpp"

namespace radar_odom {
namespace {

void normalize_to_peak(std::vector<double>& values) {
  const double peak = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  if (peak <= 0.0) {
    std::fill(values.begin(), values.end(), 0.0);
    return;
  }
  for (double& v : values) v = std::min(v / peak, 1.0);
}

}  // namespace

DescriptorParams DescriptorParams::for_sensor(const SensorMeta& meta) {
  meta.validate();
  return {meta.num_azimuths, meta.num_range_bins, meta.max_range()};
}

void DescriptorParams::validate() const {
  require(alpha >= 2, "DescriptorParams: alpha must be >= 2");
  require(rho >= 1, "DescriptorParams: rho must be >= 1");
  require(std::isfinite(max_range) && max_range > 0.0, "DescriptorParams: max_range must be positive");
}

double descriptor_distance(const Descriptor& lhs, const Descriptor& rhs) {
  require(lhs.angular.size() == rhs.angular.size() && lhs.radial.size() == rhs.radial.size(),
          "descriptor_distance: descriptor shapes differ");
  double sum = 0.0;
  for (std::size_t k = 0; k < lhs.angular.size(); ++k) {
    const double d = lhs.angular[k] - rhs.angular[k];
    sum += d * d;
  }
  for (std::size_t k = 0; k < lhs.radial.size(); ++k) {
    const double d = lhs.radial[k] - rhs.radial[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

Descriptor compute_descriptor(const KeypointSet& set, std::size_t index, const DescriptorParams& params) {
  params.validate();
  require(index < set.size(), "compute_descriptor: keypoint index out of range");
  const auto alpha = static_cast<std::size_t>(params.alpha);
  const auto rho = static_cast<std::size_t>(params.rho);
  const CartesianPoint& center = set.keypoints[index].point;
  const double annulus_width = params.max_range / static_cast<double>(params.rho);

  std::vector<std::complex<double>> spectrum(alpha, {0.0, 0.0});
  std::vector<double> radial(rho, 0.0);
  // Frequencies above alpha / 2 alias to negative ones, as for a binned DFT.
  const std::size_t positive_count = alpha / 2 + 1;

  for (std::size_t j = 0; j < set.size(); ++j) {
    if (j == index) continue;
    const CartesianPoint& p = set.keypoints[j].point;
    const double weight = point_range(p) / params.max_range;
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    const double distance = std::hypot(dx, dy);

    const double ratio = distance / annulus_width;
    const std::size_t bin = ratio >= static_cast<double>(rho - 1) ? rho - 1 : static_cast<std::size_t>(ratio);
    radial[bin] += weight;

    const double phi = std::atan2(dy, dx);
    const std::complex<double> step = std::polar(1.0, -phi);
    std::complex<double> phase(weight, 0.0);
    for (std::size_t k = 0; k < positive_count && k < alpha; ++k) {
      spectrum[k] += phase;
      if (k > 0 && alpha - k >= positive_count) spectrum[alpha - k] += std::conj(phase);
      phase *= step;
    }
  }

  Descriptor descriptor;
  descriptor.angular.resize(alpha);
  for (std::size_t k = 0; k < alpha; ++k) descriptor.angular[k] = std::abs(spectrum[k]);
  normalize_to_peak(descriptor.angular);
  normalize_to_peak(radial);
  descriptor.radial = std::move(radial);
  return descriptor;
}

std::vector<Descriptor> compute_descriptors(const KeypointSet& set, const DescriptorParams& params) {
  std::vector<Descriptor> out;
  out.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) out.push_back(compute_descriptor(set, i, params));
  return out;
}

UnaryMatches propose_unary_matches(const KeypointSet& l1, std::span<const Descriptor> d1, const KeypointSet& l2,
                                   std::span<const Descriptor> d2, std::optional<double> gate_radius) {
  require(!l1.empty() && !l2.empty(), "propose_unary_matches: both keypoint sets must be non-empty");
  require(l1.size() <= l2.size(), "propose_unary_matches: requires |L1| <= |L2|");
  require(d1.size() == l1.size() && d2.size() == l2.size(), "propose_unary_matches: descriptor count mismatch");
  if (gate_radius) require(*gate_radius >= 0.0, "propose_unary_matches: gate radius must be >= 0");

  UnaryMatches matches;
  for (std::size_t i = 0; i < l1.size(); ++i) {
    const CartesianPoint& origin = l1.keypoints[i].point;
    double best_distance = std::numeric_limits<double>::infinity();
    int best = -1;
    for (std::size_t j = 0; j < l2.size(); ++j) {
      if (gate_radius) {
        const CartesianPoint& p = l2.keypoints[j].point;
        if (std::hypot(p.x - origin.x, p.y - origin.y) > *gate_radius) continue;
      }
      const double distance = descriptor_distance(d1[i], d2[j]);
      if (distance < best_distance) {
        best_distance = distance;
        best = static_cast<int>(j);
      }
    }
    if (best >= 0) matches.pairs.push_back({static_cast<int>(i), best, best_distance});
  }
  if (matches.pairs.empty()) throw_error(ErrorCode::kNoCandidates, "no unary candidates survived the gate");
  return matches;
}

UnaryMatches propose_unary_matches(const KeypointSet& l1, const KeypointSet& l2, const DescriptorParams& params,
                                   std::optional<double> gate_radius) {
  require(!l1.empty() && !l2.empty(), "propose_unary_matches: both keypoint sets must be non-empty");
  const std::vector<Descriptor> d1 = compute_descriptors(l1, params);
  const std::vector<Descriptor> d2 = compute_descriptors(l2, params);
  return propose_unary_matches(l1, d1, l2, d2, gate_radius);
}

}  // namespace radar_odom
