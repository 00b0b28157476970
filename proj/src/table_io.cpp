#include <charconv>
#include <numbers>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "radar_odom/error.hpp"
#include "radar_odom/io.hpp"

namespace radar_odom {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

// Data rows after checking the header; rows must have header.size() fields.
std::vector<std::vector<std::string>> read_rows(std::istream& in, const std::vector<std::string>& header) {
  std::string line;
  if (!std::getline(in, line)) throw_error(ErrorCode::kIo, "empty CSV");
  std::vector<std::string> found = split_csv_line(strip(line));
  for (auto& name : found) name = strip(name);
  if (found != header) throw_error(ErrorCode::kIo, "unexpected CSV header: " + line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) throw_error(ErrorCode::kIo, "malformed CSV row: " + line);
    for (auto& f : fields) f = strip(f);
    rows.push_back(std::move(fields));
  }
  return rows;
}

int parse_int(const std::string& text) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw_error(ErrorCode::kIo, "bad integer '" + text + "'");
  return value;
}

const std::vector<std::string> kTrajectoryHeader = {"timestamp", "x", "y", "theta"};
const std::vector<std::string> kRelativeHeader = {
    "timestamp_a", "timestamp_b",          "x",           "y",           "theta",
    "failed",      "fallback",             "keypoints_a", "keypoints_b", "candidates",
    "matches",     "mutual_compatibility", "eigengap",    "residual_rms", "eigen_iterations",
    "seconds_extract", "seconds_associate", "seconds_motion"};

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) throw_error(ErrorCode::kIo, "cannot format number");
  return std::string(buffer, ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw_error(ErrorCode::kIo, "bad number '" + text + "'");
  return value;
}

void write_keypoints_csv(const KeypointSet& set, std::ostream& out) {
  out << "azimuth_index,range_bin,x,y,strength\n";
  for (const Keypoint& k : set.keypoints) {
    out << k.azimuth_index << ',' << k.range_bin << ',' << format_double(k.point.x) << ','
        << format_double(k.point.y) << ',' << format_double(k.strength) << '\n';
  }
}

void write_trajectory_csv(std::span<const StampedPose> poses, std::ostream& out) {
  out << "timestamp,x,y,theta\n";
  for (const StampedPose& p : poses) {
    out << format_double(p.timestamp) << ',' << format_double(p.pose.x) << ',' << format_double(p.pose.y) << ','
        << format_double(p.pose.theta) << '\n';
  }
}

TrajectorySpec read_trajectory_csv(std::istream& in) {
  TrajectorySpec trajectory;
  for (const auto& row : read_rows(in, kTrajectoryHeader)) {
    trajectory.poses.push_back(
        {parse_double(row[0]), Pose2(parse_double(row[1]), parse_double(row[2]), parse_double(row[3]))});
  }
  try {
    trajectory.validate();
  } catch (const Error& error) {
    throw_error(ErrorCode::kIo, std::string("invalid trajectory: ") + error.what());
  }
  return trajectory;
}

void write_relative_csv(std::span<const RelativePose> poses, std::ostream& out) {
  for (std::size_t i = 0; i < kRelativeHeader.size(); ++i) out << (i ? "," : "") << kRelativeHeader[i];
  out << '\n';
  for (const RelativePose& r : poses) {
    const PairDiagnostics& d = r.diagnostics;
    out << format_double(r.timestamp_a) << ',' << format_double(r.timestamp_b) << ',' << format_double(r.pose.x)
        << ',' << format_double(r.pose.y) << ',' << format_double(r.pose.theta) << ',' << (d.failed ? 1 : 0) << ','
        << (d.fallback ? 1 : 0) << ',' << d.keypoints_a << ',' << d.keypoints_b << ',' << d.candidates << ','
        << d.matches << ',' << format_double(d.mutual_compatibility) << ',' << format_double(d.eigengap) << ','
        << format_double(d.residual_rms) << ',' << d.eigen_iterations << ',' << format_double(d.seconds_extract)
        << ',' << format_double(d.seconds_associate) << ',' << format_double(d.seconds_motion) << '\n';
  }
}

std::vector<RelativePose> read_relative_csv(std::istream& in) {
  std::vector<RelativePose> poses;
  for (const auto& row : read_rows(in, kRelativeHeader)) {
    RelativePose r;
    r.timestamp_a = parse_double(row[0]);
    r.timestamp_b = parse_double(row[1]);
    r.pose = Pose2(parse_double(row[2]), parse_double(row[3]), parse_double(row[4]));
    PairDiagnostics& d = r.diagnostics;
    d.failed = parse_int(row[5]) != 0;
    d.fallback = parse_int(row[6]) != 0;
    d.keypoints_a = parse_int(row[7]);
    d.keypoints_b = parse_int(row[8]);
    d.candidates = parse_int(row[9]);
    d.matches = parse_int(row[10]);
    d.mutual_compatibility = parse_double(row[11]);
    d.eigengap = parse_double(row[12]);
    d.residual_rms = parse_double(row[13]);
    d.eigen_iterations = parse_int(row[14]);
    d.seconds_extract = parse_double(row[15]);
    d.seconds_associate = parse_double(row[16]);
    d.seconds_motion = parse_double(row[17]);
    poses.push_back(std::move(r));
  }
  return poses;
}

void write_landmarks_csv(std::span<const Landmark> landmarks, std::ostream& out) {
  out << "x,y,reflectivity\n";
  for (const Landmark& l : landmarks) {
    out << format_double(l.position.x) << ',' << format_double(l.position.y) << ','
        << format_double(l.reflectivity) << '\n';
  }
}

KeyValues metrics_to_key_values(const EvaluationMetrics& m, const std::string& method) {
  constexpr double kDeg = 180.0 / std::numbers::pi;
  return {
      {"method", method},
      {"pairs", std::to_string(m.pairs)},
      {"failures", std::to_string(m.failures)},
      {"translation_median_m", format_double(m.translation_median)},
      {"translation_std_m", format_double(m.translation_std)},
      {"rotation_median_deg", format_double(m.rotation_median * kDeg)},
      {"rotation_std_deg", format_double(m.rotation_std * kDeg)},
      {"mean_mutual_compatibility", format_double(m.mean_mutual_compatibility)},
      {"mean_eigengap", format_double(m.mean_eigengap)},
      {"time_per_pair_p50_s", format_double(m.time_p50)},
      {"time_per_pair_p90_s", format_double(m.time_p90)},
      {"time_per_pair_max_s", format_double(m.time_max)},
  };
}

void write_key_values(const KeyValues& values, std::ostream& out) {
  for (const auto& [key, value] : values) out << key << " = " << value << '\n';
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw_error(ErrorCode::kIo, "failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace radar_odom
