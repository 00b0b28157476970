#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "radar_odom/keypoints.hpp"
#include "radar_odom/odometry.hpp"
#include "radar_odom/scan_model.hpp"
#include "radar_odom/simulator.hpp"

namespace radar_odom {

// Scan files are little-endian binary:
//   8 bytes   magic "RODSCAN1"
//   uint32    num_azimuths, num_range_bins
//   float64   range_resolution, scan_period, timestamp
//   float64   m * n power values, azimuth-major
// and round-trip bit-exactly.
void write_scan(const PolarScan& scan, std::ostream& out);
PolarScan read_scan(std::istream& in);
void write_scan_file(const PolarScan& scan, const std::filesystem::path& path);
PolarScan read_scan_file(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);

// CSV tables, one header row each. Reads tolerate trailing blank lines.
void write_keypoints_csv(const KeypointSet& set, std::ostream& out);
void write_trajectory_csv(std::span<const StampedPose> poses, std::ostream& out);
TrajectorySpec read_trajectory_csv(std::istream& in);
void write_relative_csv(std::span<const RelativePose> poses, std::ostream& out);
std::vector<RelativePose> read_relative_csv(std::istream& in);
void write_landmarks_csv(std::span<const Landmark> landmarks, std::ostream& out);

/// Ordered key = value text, one pair per line.
using KeyValues = std::vector<std::pair<std::string, std::string>>;
KeyValues metrics_to_key_values(const EvaluationMetrics& metrics, const std::string& method);
void write_key_values(const KeyValues& values, std::ostream& out);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace radar_odom
