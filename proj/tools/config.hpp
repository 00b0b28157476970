#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "radar_odom/bench.hpp"
#include "radar_odom/icp.hpp"
#include "radar_odom/io.hpp"
#include "radar_odom/odometry.hpp"
#include "radar_odom/simulator.hpp"

namespace radar_odom::cli {

struct TrajectoryConfig {
  TrajectoryKind kind = TrajectoryKind::kStraight;
  int steps = 20;
  double speed = 4.0;     // m/s
  double yaw_rate = 0.0;  // rad/s
  double dt = 0.25;       // s
};

struct WorldConfig {
  int landmarks = 40;
  LandmarkField field;
};

/// Everything a run depends on. Parsed from a flat `key = value` file.
struct RunConfig {
  std::uint64_t seed = 1;
  SensorMeta sensor;
  ArtifactModel artifacts;
  TrajectoryConfig trajectory;
  WorldConfig world;
  std::string method = "ro";
  int workers = 1;
  PipelineConfig pipeline;
  IcpConfig icp;
  BenchConfig bench;
  bool svg = false;

  /// Throws kConfig on any value outside its domain.
  void validate() const;
};

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
/// Unknown keys, duplicate keys and malformed values throw kConfig; keys
/// under `manifest.` and `timing.` are accepted and ignored so a run
/// manifest can be fed back as a config.
RunConfig parse_config(std::string_view text, RunConfig base = {});

/// Canonical key/value snapshot; parse_config(to_text(cfg)) == cfg.
KeyValues config_key_values(const RunConfig& cfg);
std::string to_text(const KeyValues& values);

}  // namespace radar_odom::cli
