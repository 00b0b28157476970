#pragma once

#include <optional>
#include <span>
#include <vector>

#include "radar_odom/keypoints.hpp"

namespace radar_odom {

struct DescriptorParams {
  int alpha = 100;         // angular slices
  int rho = 200;           // annuli
  double max_range = 100;  // meters; normalizes range weights and sets annulus width

  /// Matches the sensor resolution: alpha = m, rho = n, max_range = n * res.
  static DescriptorParams for_sensor(const SensorMeta& meta);
  void validate() const;
};

/// Rotation-invariant signature of a keypoint's neighbourhood. Both halves
/// are normalized to a peak of 1; a keypoint without neighbours gets zeros.
struct Descriptor {
  std::vector<double> angular;  // length alpha
  std::vector<double> radial;   // length rho
};

double descriptor_distance(const Descriptor& lhs, const Descriptor& rhs);

/// Describes keypoint `index` of `set` from every other keypoint, each
/// weighted by its range from the radar over max_range.
///
/// Angular half: magnitudes of the length-alpha DFT of the angular
/// histogram around the keypoint. Each neighbour is placed at its exact
/// fractional slice instead of being rounded to a slice, so the DFT is
/// evaluated directly as sum_j w_j exp(-i f_k phi_j) with signed frequency
/// f_k (k, or k - alpha above alpha / 2). A rigid rotation adds a constant
/// to every phi_j and leaves the magnitudes untouched; so does translation.
///
/// Radial half: weighted histogram of distances from the keypoint, annulus
/// width max_range / rho, overflow clipped into the last annulus.
Descriptor compute_descriptor(const KeypointSet& set, std::size_t index, const DescriptorParams& params);

std::vector<Descriptor> compute_descriptors(const KeypointSet& set, const DescriptorParams& params);

struct CandidateMatch {
  int first = 0;   // index into L1
  int second = 0;  // index into L2
  double descriptor_distance = 0.0;

  friend bool operator==(const CandidateMatch&, const CandidateMatch&) = default;
};

/// One candidate per L1 keypoint (first indices are distinct). Second
/// indices may repeat; uniqueness is enforced by the graph matcher.
struct UnaryMatches {
  std::vector<CandidateMatch> pairs;

  std::size_t size() const { return pairs.size(); }
};

/// Nearest-descriptor proposal for each L1 keypoint, optionally restricted
/// to L2 keypoints within `gate_radius` meters of the L1 keypoint's
/// position. Ties go to the lowest L2 index. L1 keypoints left without a
/// candidate by the gate are dropped; throws kNoCandidates if none remain.
/// Requires 1 <= |L1| <= |L2|.
UnaryMatches propose_unary_matches(const KeypointSet& l1, const KeypointSet& l2, const DescriptorParams& params,
                                   std::optional<double> gate_radius = std::nullopt);

/// Same as above with descriptors already computed for both sets.
UnaryMatches propose_unary_matches(const KeypointSet& l1, std::span<const Descriptor> d1, const KeypointSet& l2,
                                   std::span<const Descriptor> d2, std::optional<double> gate_radius = std::nullopt);

}  // namespace radar_odom
